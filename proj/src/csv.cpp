#include "survkit/csv.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace survkit {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string current;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(current);
      current.clear();
    } else if (c != '\r') {
      current.push_back(c);
    }
  }
  fields.push_back(current);
  return fields;
}

double parse_double(const std::string& field, const std::string& origin,
                    std::size_t line_no, const std::string& column) {
  double value = 0.0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc{} || ptr != last || field.empty()) {
    std::ostringstream os;
    os << origin << ":" << line_no << ": cannot parse '" << field
       << "' as a number in column " << column;
    throw Error(ErrorCode::parse, os.str());
  }
  return value;
}

}  // namespace

std::string format_double(double value) {
  char buffer[32];
  auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  (void)ec;
  return std::string(buffer, ptr);
}

Dataset read_records_csv(std::istream& in, const std::string& origin) {
  std::string line;
  if (!std::getline(in, line)) {
    throw Error(ErrorCode::parse, origin + ": missing header line");
  }
  const auto header = split_line(line);

  constexpr const char* required[] = {"id", "entry", "exit", "from", "to"};
  std::size_t col[5];
  for (std::size_t i = 0; i < 5; ++i) {
    auto it = std::find(header.begin(), header.end(), required[i]);
    if (it == header.end()) {
      throw Error(ErrorCode::parse, origin + ": header lacks required column '" +
                                        required[i] + "'");
    }
    col[i] = static_cast<std::size_t>(it - header.begin());
  }
  auto group_it = std::find(header.begin(), header.end(), "group");
  const bool has_group = group_it != header.end();
  const std::size_t group_col =
      has_group ? static_cast<std::size_t>(group_it - header.begin()) : 0;

  std::vector<std::size_t> covariate_cols;
  std::vector<std::string> covariate_names;
  for (std::size_t i = 0; i < header.size(); ++i) {
    bool named = i == col[0] || i == col[1] || i == col[2] || i == col[3] ||
                 i == col[4] || (has_group && i == group_col);
    if (!named) {
      covariate_cols.push_back(i);
      covariate_names.push_back(header[i]);
    }
  }

  std::vector<EventRecord> records;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto fields = split_line(line);
    if (fields.size() != header.size()) {
      std::ostringstream os;
      os << origin << ":" << line_no << ": expected " << header.size()
         << " fields, got " << fields.size();
      throw Error(ErrorCode::parse, os.str());
    }
    EventRecord r;
    r.subject = fields[col[0]];
    r.entry = parse_double(fields[col[1]], origin, line_no, "entry");
    r.exit = parse_double(fields[col[2]], origin, line_no, "exit");
    r.from = fields[col[3]];
    r.to = fields[col[4]];
    if (has_group) r.group = fields[group_col];
    r.covariates.reserve(covariate_cols.size());
    for (std::size_t i = 0; i < covariate_cols.size(); ++i) {
      r.covariates.push_back(parse_double(fields[covariate_cols[i]], origin,
                                          line_no, covariate_names[i]));
    }
    records.push_back(std::move(r));
  }

  Dataset dataset;
  dataset.records = validate_records(std::move(records));
  dataset.covariate_names = std::move(covariate_names);
  return dataset;
}

Dataset read_records_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::io, "cannot open '" + path + "' for reading");
  }
  return read_records_csv(in, path);
}

void write_records_csv(const Dataset& dataset, std::ostream& out) {
  out << "id,entry,exit,from,to,group";
  for (const auto& name : dataset.covariate_names) out << ',' << name;
  out << '\n';
  for (const auto& r : dataset.records.records()) {
    out << r.subject << ',' << format_double(r.entry) << ','
        << format_double(r.exit) << ',' << r.from << ',' << r.to << ','
        << r.group;
    for (double z : r.covariates) out << ',' << format_double(z);
    out << '\n';
  }
}

void write_records_csv(const Dataset& dataset, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw Error(ErrorCode::io, "cannot open '" + path + "' for writing");
  }
  write_records_csv(dataset, out);
  if (!out) {
    throw Error(ErrorCode::io, "failed while writing '" + path + "'");
  }
}

}  // namespace survkit
