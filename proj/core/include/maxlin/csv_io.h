#ifndef MAXLIN_CSV_IO_H_
#define MAXLIN_CSV_IO_H_

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "maxlin/model.h"

namespace maxlin {

class CsvError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shortest round-trip decimal form, independent of the global locale.
// Infinity is written as `inf`, negative infinity as `-inf`.
std::string FormatDouble(double v);
// Inverse of FormatDouble; also accepts `inf`/`-inf`. Throws CsvError.
double ParseDouble(std::string_view s);

// Splits one CSV line on commas (no quoting; none of our schemas need it).
std::vector<std::string_view> SplitCsvLine(std::string_view line);

// Header `x1,...,xp,y[,w]`, one row per sample.
void WriteDatasetCsv(std::ostream& out, const Dataset& data);
Dataset ReadDatasetCsv(std::istream& in);

// Header `component,coord1,...,coordp`, one row per block; components are
// numbered from 1.
void WriteParamBlocksCsv(std::ostream& out, const ParamBlocks& beta);
ParamBlocks ReadParamBlocksCsv(std::istream& in);

Dataset LoadDataset(const std::filesystem::path& path);
void SaveDataset(const std::filesystem::path& path, const Dataset& data);
ParamBlocks LoadParamBlocks(const std::filesystem::path& path);
void SaveParamBlocks(const std::filesystem::path& path, const ParamBlocks& beta);

// Whole-file helpers used by the CLI.
std::string ReadFile(const std::filesystem::path& path);
void WriteFile(const std::filesystem::path& path, std::string_view contents);

}  // namespace maxlin

#endif  // MAXLIN_CSV_IO_H_
