#include "concrete/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <optional>
#include <sstream>
#include <unordered_map>

#include "concrete/error.hpp"
#include "concrete/random.hpp"
#include "concrete/text.hpp"

namespace concrete {

namespace {

std::string normalize_header(std::string_view name) {
  std::string out;
  for (char c : name) {
    if (std::isspace(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '-') continue;
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

// Normalized header -> schema index.
const std::unordered_map<std::string, int>& header_aliases() {
  static const std::unordered_map<std::string, int> table = {
      {"cement", 0},
      {"slag", 1},         {"blastfurnaceslag", 1},
      {"ash", 2},          {"flyash", 2},
      {"water", 3},
      {"superplastic", 4}, {"superplasticizer", 4},
      {"coarseagg", 5},    {"coarseaggregate", 5},
      {"fineagg", 6},      {"fineaggregate", 6},
      {"age", 7},
      {"strength", 8},     {"compressivestrength", 8}, {"csmpa", 8},
  };
  return table;
}

std::optional<double> parse_number(std::string_view cell) {
  cell = trim(cell);
  if (cell.empty()) return std::nullopt;
  if (cell.front() == '+') cell.remove_prefix(1);
  double value = 0;
  auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc() || ptr != cell.data() + cell.size()) return std::nullopt;
  return value;
}

}  // namespace

std::string_view material_name(Material m) { return kSchemaColumns[static_cast<int>(m)]; }

void validate(const MixRecord& r, std::size_t row) {
  for (std::size_t i = 0; i < kMaterialCount; ++i) {
    const double q = r.materials[i];
    const std::string col(kSchemaColumns[i]);
    if (!std::isfinite(q))
      throw DataError("NonNumericCell", "row " + std::to_string(row) + ", column " + col + ": not finite", row, col);
    if (q < 0)
      throw DataError("NegativeQuantity",
                      "row " + std::to_string(row) + ", column " + col + ": negative quantity " + format_number(q),
                      row, col);
  }
  if (r.age < 1 || r.age > 365)
    throw DataError("InvalidAge", "row " + std::to_string(row) + ": age " + std::to_string(r.age) + " outside [1, 365]",
                    row, "age");
  if (!std::isfinite(r.strength) || r.strength <= 0)
    throw DataError("InvalidStrength", "row " + std::to_string(row) + ": strength must be finite and > 0", row,
                    "strength");
}

Dataset parse_csv(std::istream& in, std::string provenance) {
  std::string line;
  if (!std::getline(in, line) || trim(line).empty()) throw DataError("EmptyFile", "no header row in " + provenance);
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);

  const auto header = split_fields(line, ',');
  std::array<int, kSchemaColumns.size()> position;
  position.fill(-1);
  for (std::size_t c = 0; c < header.size(); ++c) {
    auto it = header_aliases().find(normalize_header(header[c]));
    if (it != header_aliases().end() && position[it->second] < 0) position[it->second] = static_cast<int>(c);
  }
  for (std::size_t k = 0; k < kSchemaColumns.size(); ++k) {
    if (position[k] < 0)
      throw DataError("MissingColumn", "missing column '" + std::string(kSchemaColumns[k]) + "' in " + provenance, 0,
                      std::string(kSchemaColumns[k]));
  }

  Dataset d;
  d.provenance = std::move(provenance);
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    ++row;
    const auto cells = split_fields(line, ',');
    double values[kSchemaColumns.size()];
    for (std::size_t k = 0; k < kSchemaColumns.size(); ++k) {
      const auto c = static_cast<std::size_t>(position[k]);
      const std::string col(kSchemaColumns[k]);
      auto v = c < cells.size() ? parse_number(cells[c]) : std::nullopt;
      if (!v)
        throw DataError("NonNumericCell",
                        "row " + std::to_string(row) + ", column " + col + ": cannot parse '" +
                            (c < cells.size() ? std::string(cells[c]) : std::string("<missing>")) + "'",
                        row, col);
      values[k] = *v;
    }
    MixRecord r;
    std::copy_n(values, kMaterialCount, r.materials.begin());
    if (values[7] != std::floor(values[7]))
      throw DataError("NonNumericCell", "row " + std::to_string(row) + ", column age: not an integer", row, "age");
    r.age = static_cast<int>(std::clamp(values[7], -1.0, 100000.0));
    r.strength = values[8];
    validate(r, row);
    d.records.push_back(r);
  }
  if (d.records.empty()) throw DataError("EmptyFile", "no data rows in " + d.provenance);
  return d;
}

Dataset load_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("FileNotFound", "cannot open dataset " + path.string());
  return parse_csv(in, path.string());
}

void write_csv(std::ostream& out, const Dataset& d) {
  for (std::size_t k = 0; k < kSchemaColumns.size(); ++k) out << (k ? "," : "") << kSchemaColumns[k];
  out << '\n';
  for (const auto& r : d.records) {
    for (double q : r.materials) out << format_number(q) << ',';
    out << r.age << ',' << format_number(r.strength) << '\n';
  }
}

void save_csv(const std::filesystem::path& path, const Dataset& d) {
  std::ofstream out(path);
  if (!out) throw Error("IoError", "cannot write " + path.string());
  write_csv(out, d);
}

Dataset filter_age(const Dataset& d, int age) {
  Dataset out;
  out.provenance = d.provenance;
  std::copy_if(d.records.begin(), d.records.end(), std::back_inserter(out.records),
               [age](const MixRecord& r) { return r.age == age; });
  if (out.empty()) throw DataError("EmptyResult", "no records with age " + std::to_string(age));
  return out;
}

IndexSplit split_indices(std::size_t n, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0 && train_fraction < 1))
    throw Error("InvalidFraction", "train fraction must lie in (0, 1)");
  const auto n_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(n)));
  if (n < 2 || n_train == 0 || n_train >= n)
    throw DataError("TooFewRecords", "cannot split " + std::to_string(n) + " records at fraction " +
                                         format_number(train_fraction));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  rng.shuffle(order);
  IndexSplit s;
  s.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  s.test.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
  return s;
}

Split split(const Dataset& d, double train_fraction, std::uint64_t seed) {
  const auto idx = split_indices(d.size(), train_fraction, seed);
  Split s;
  s.seed = seed;
  s.train_fraction = train_fraction;
  s.train.provenance = s.test.provenance = d.provenance;
  for (auto i : idx.train) s.train.records.push_back(d.records[i]);
  for (auto i : idx.test) s.test.records.push_back(d.records[i]);
  return s;
}

}  // namespace concrete
