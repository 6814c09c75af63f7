#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "noisysort/model.hpp"
#include "noisysort/permutation.hpp"

namespace noisysort {

/// Text format: header `n model_tag budget seed`, then one `i j N_ij A_ij`
/// line (1-indexed) per ordered pair with N_ij > 0, in row-major order.
void write_dataset(std::ostream& out, const ComparisonDataset& d);
ComparisonDataset read_dataset(std::istream& in);

void save_dataset(const std::filesystem::path& path, const ComparisonDataset& d);
ComparisonDataset load_dataset(const std::filesystem::path& path);

void save_permutation(const std::filesystem::path& path, const Permutation& p);
Permutation load_permutation(const std::filesystem::path& path);

/// Plain (P1) portable bitmap of an n x n 0/1 grid, row-major.
void write_pbm(std::ostream& out, std::size_t rows, std::size_t cols, std::span<const std::uint8_t> bits);

}  // namespace noisysort
