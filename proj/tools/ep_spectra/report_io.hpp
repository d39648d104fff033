#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "epspectra/numerics.hpp"

namespace ep_cli {

using nlohmann::json;
using epspectra::numerics::ComplexMatrix;
using epspectra::numerics::ComplexVector;
using epspectra::numerics::cplx;

inline constexpr const char* kSchemaVersion = "1.2";

json to_json(cplx z);
json to_json(std::span<const cplx> values);
json to_json(const ComplexVector& v);
// Row-major {"rows", "cols", "re", "im"}.
json to_json(const ComplexMatrix& m);

struct CsvTable {
  std::string name;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add(std::vector<std::string> row) { rows.push_back(std::move(row)); }
};

std::string fmt(double x);
std::string fmt(long long x);
std::string fmt(bool b);

void write_text(const std::filesystem::path& path, const std::string& text);
void write_csv(const std::filesystem::path& path, const CsvTable& table);

}  // namespace ep_cli
