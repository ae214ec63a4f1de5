#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "survkit/event_data.hpp"

namespace survkit {

// Validated records plus the covariate column names they were read with.
struct Dataset {
  ValidatedRecords records;
  std::vector<std::string> covariate_names;
};

// Reads the record CSV format: header `id,entry,exit,from,to[,group][,...]`
// where any column beyond the named ones is a covariate. `to` is the literal
// CENSORED for censored intervals. Times use '.' as decimal separator; empty
// covariate cells are rejected.
Dataset read_records_csv(const std::string& path);
Dataset read_records_csv(std::istream& in, const std::string& origin);

void write_records_csv(const Dataset& dataset, const std::string& path);
void write_records_csv(const Dataset& dataset, std::ostream& out);

// Shortest round-trip decimal formatting; used by every CSV writer so that
// identical runs emit identical bytes.
std::string format_double(double value);

}  // namespace survkit
