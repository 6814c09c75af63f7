#include "noisysort/dataset_io.hpp"

#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <utility>

#include "noisysort/errors.hpp"

namespace noisysort {

namespace {

std::string format_budget(const SamplingTag& tag) {
  if (tag.model == SamplingModel::WithReplacement) {
    return std::to_string(static_cast<std::uint64_t>(tag.budget));
  }
  std::ostringstream s;
  s.precision(17);
  s << tag.budget;
  return s.str();
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

}  // namespace

void write_dataset(std::ostream& out, const ComparisonDataset& d) {
  out << d.size() << ' ' << d.tag().name() << ' ' << format_budget(d.tag()) << ' ' << d.seed() << '\n';
  for (std::size_t i = 1; i <= d.size(); ++i) {
    d.for_each_in_row(i, [&](std::size_t j, std::uint32_t a_ij) {
      const std::uint32_t n_ij = a_ij + d.wins(j, i);
      if (n_ij > 0) out << i << ' ' << j << ' ' << n_ij << ' ' << a_ij << '\n';
    });
  }
}

ComparisonDataset read_dataset(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw PreconditionError("dataset file is empty");
  std::istringstream hs(header);
  std::size_t n = 0;
  std::string model;
  double budget = 0;
  std::uint64_t seed = 0;
  if (!(hs >> n >> model >> budget >> seed) || n < 1) {
    throw PreconditionError("malformed dataset header: '" + header + "'");
  }
  const SamplingTag tag{SamplingTag::parse_model(model), budget};

  std::map<std::pair<std::size_t, std::size_t>, std::pair<std::uint32_t, std::uint32_t>> lines;
  std::string line;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream ls(line);
    std::size_t i = 0, j = 0;
    std::uint32_t n_ij = 0, a_ij = 0;
    if (!(ls >> i >> j >> n_ij >> a_ij) || i < 1 || j < 1 || i > n || j > n || i == j || a_ij > n_ij) {
      throw PreconditionError("malformed dataset line " + std::to_string(lineno) + ": '" + line + "'");
    }
    if (!lines.emplace(std::make_pair(i, j), std::make_pair(n_ij, a_ij)).second) {
      throw PreconditionError("duplicate pair on line " + std::to_string(lineno));
    }
  }

  std::uint64_t total = 0;
  for (const auto& [key, val] : lines) {
    const auto [i, j] = key;
    const auto mirror = lines.find({j, i});
    const std::uint32_t a_ji = mirror == lines.end() ? 0 : mirror->second.second;
    const std::uint32_t n_ji = mirror == lines.end() ? val.first : mirror->second.first;
    if (val.first != n_ji || val.second + a_ji != val.first) {
      throw PreconditionError("inconsistent counts for pair (" + std::to_string(i) + "," +
                              std::to_string(j) + "): need A_ij + A_ji = N_ij = N_ji");
    }
    if (i < j) total += val.first;
  }

  DatasetBuilder builder(n, total);
  for (const auto& [key, val] : lines) builder.add_win(key.first, key.second, val.second);
  if (tag.model == SamplingModel::WithReplacement && static_cast<std::uint64_t>(budget) != total) {
    throw PreconditionError("with-replacement dataset declares N = " + std::to_string(budget) +
                            " but holds " + std::to_string(total) + " comparisons");
  }
  return std::move(builder).build(tag, seed);
}

void save_dataset(const std::filesystem::path& path, const ComparisonDataset& d) {
  auto out = open_out(path);
  write_dataset(out, d);
}

ComparisonDataset load_dataset(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_dataset(in);
}

void save_permutation(const std::filesystem::path& path, const Permutation& p) {
  auto out = open_out(path);
  out << p.to_string() << '\n';
}

Permutation load_permutation(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::string line;
  std::getline(in, line);
  return Permutation::parse(line);
}

void write_pbm(std::ostream& out, std::size_t rows, std::size_t cols, std::span<const std::uint8_t> bits) {
  if (bits.size() != rows * cols) throw DimensionMismatch(bits.size(), rows * cols);
  out << "P1\n" << cols << ' ' << rows << '\n';
  std::string line;
  for (std::size_t r = 0; r < rows; ++r) {
    line.clear();
    // PBM caps lines at 70 characters; bare digits need no separators.
    for (std::size_t c = 0; c < cols; ++c) {
      line.push_back(bits[r * cols + c] ? '1' : '0');
      if ((c + 1) % 70 == 0 && c + 1 < cols) line.push_back('\n');
    }
    out << line << '\n';
  }
}

}  // namespace noisysort
