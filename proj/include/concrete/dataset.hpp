#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace concrete {

/// Raw materials in schema order. Quantities are kg per m^3 of concrete.
enum class Material : int {
  Cement = 0,
  Slag,
  Ash,
  Water,
  Superplastic,
  CoarseAgg,
  FineAgg,
};

inline constexpr std::size_t kMaterialCount = 7;

/// Canonical (Kaggle) column names, materials first, then age and strength.
inline constexpr std::array<std::string_view, 9> kSchemaColumns = {
    "cement", "slag", "ash", "water", "superplastic", "coarseagg", "fineagg", "age", "strength"};

std::string_view material_name(Material m);

/// One dataset row.
struct MixRecord {
  std::array<double, kMaterialCount> materials{};
  int age = 28;          // days, [1, 365]
  double strength = 0;   // MPa, > 0

  double cement() const { return materials[0]; }
  double water() const { return materials[3]; }
  double operator[](Material m) const { return materials[static_cast<int>(m)]; }

  bool operator==(const MixRecord&) const = default;
};

/// Throws DataError if the record violates its invariants. `row` is used
/// only for the error location.
void validate(const MixRecord& record, std::size_t row = 0);

struct Dataset {
  std::vector<MixRecord> records;
  std::string provenance;

  std::size_t size() const { return records.size(); }
  bool empty() const { return records.empty(); }
};

struct Split {
  Dataset train;
  Dataset test;
  std::uint64_t seed = 0;
  double train_fraction = 0.9;
};

/// Parses CSV text. Header names are matched case-insensitively after
/// trimming, through an alias table covering the Kaggle names
/// ("coarseagg"), display names ("Coarse Agg.") and UCI-style long names
/// ("coarse_aggregate"). Any invalid row aborts the load.
Dataset parse_csv(std::istream& in, std::string provenance = {});
Dataset load_csv(const std::filesystem::path& path);

/// Writes the canonical header and one line per record using the shortest
/// decimal representation that round-trips.
void write_csv(std::ostream& out, const Dataset& d);
void save_csv(const std::filesystem::path& path, const Dataset& d);

/// Records with `age` in load order. Throws DataError("EmptyResult") if none.
Dataset filter_age(const Dataset& d, int age);

/// Seeded permutation of [0, n) split into (train, test) index lists, with
/// |train| = round(train_fraction * n). Throws "TooFewRecords" if either side
/// would be empty.
struct IndexSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};
IndexSplit split_indices(std::size_t n, double train_fraction, std::uint64_t seed);

Split split(const Dataset& d, double train_fraction, std::uint64_t seed);

}  // namespace concrete
