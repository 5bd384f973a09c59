#include "driftlab/branch_io.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>

#include "driftlab/csv.hpp"
#include "driftlab/errors.hpp"

namespace driftlab::branch_io {

namespace {

constexpr char kMagic[4] = {'D', 'L', 'B', 'R'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::ostream& out, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 4);
}

void put_f64(std::ostream& out, double v) {
  std::uint64_t u;
  std::memcpy(&u, &v, 8);
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(u >> (8 * i));
  out.write(reinterpret_cast<const char*>(b), 8);
}

std::uint32_t get_u32(std::istream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return v;
}

double get_f64(std::istream& in) {
  unsigned char b[8];
  in.read(reinterpret_cast<char*>(b), 8);
  std::uint64_t u = 0;
  for (int i = 0; i < 8; ++i) u |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  double v;
  std::memcpy(&v, &u, 8);
  return v;
}

}  // namespace

void write_branch(const std::string& path, const tw::Branch& branch,
                  double tol) {
  if (branch.points.empty()) throw DomainError("cannot write an empty branch");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open for writing: " + path);
  out.write(kMagic, 4);
  put_u32(out, kVersion);
  put_u32(out, static_cast<std::uint32_t>(
                   branch.points.front().profile.normalization));
  put_f64(out, tol);
  put_u32(out, static_cast<std::uint32_t>(branch.points.size()));
  for (const auto& pt : branch.points) {
    const tw::WaveProfile& p = pt.profile;
    put_f64(out, p.beta);
    put_f64(out, p.c);
    put_f64(out, p.mu);
    put_f64(out, p.m);
    put_f64(out, p.M);
    put_f64(out, p.grid.L);
    put_u32(out, static_cast<std::uint32_t>(p.grid.ell_g));
    put_u32(out, static_cast<std::uint32_t>(p.grid.N));
    for (int i = 0; i < p.grid.N; ++i) put_f64(out, p.q[i]);
  }
  if (!out) throw ConfigError("write failed: " + path);
}

tw::Branch read_branch(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open for reading: " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0)
    throw ConfigError("not a branch file: " + path);
  std::uint32_t version = get_u32(in);
  if (version != kVersion)
    throw ConfigError("unsupported branch file version: " + path);
  auto norm = static_cast<tw::Normalization>(get_u32(in));
  get_f64(in);  // tolerance, informational
  std::uint32_t npts = get_u32(in);
  tw::Branch branch;
  for (std::uint32_t j = 0; j < npts; ++j) {
    tw::WaveProfile p;
    p.beta = get_f64(in);
    p.c = get_f64(in);
    p.mu = get_f64(in);
    p.m = get_f64(in);
    p.M = get_f64(in);
    double L = get_f64(in);
    int ell = static_cast<int>(get_u32(in));
    int N = static_cast<int>(get_u32(in));
    p.grid = tw::Grid::make(L, ell);
    if (p.grid.N != N) throw ConfigError("corrupt grid record in " + path);
    p.normalization = norm;
    p.q.resize(N);
    for (int i = 0; i < N; ++i) p.q[i] = get_f64(in);
    if (!in) throw ConfigError("truncated branch file: " + path);
    branch.points.push_back(tw::BranchPoint{p.beta, p.c, p.m_infinity(), p});
  }
  return branch;
}

void write_branch_csv(const std::string& path, const tw::Branch& branch) {
  if (branch.points.empty()) throw DomainError("cannot write an empty branch");
  std::size_t nmax = 0;
  for (const auto& pt : branch.points)
    nmax = std::max(nmax, static_cast<std::size_t>(pt.profile.grid.N));
  csv::Table t;
  t.header = {"beta", "c", "mu", "m", "m_infinity", "M", "L", "ell_g", "N"};
  for (std::size_t i = 0; i < nmax; ++i)
    t.header.push_back("q" + std::to_string(i));
  for (const auto& pt : branch.points) {
    const tw::WaveProfile& p = pt.profile;
    std::vector<double> row = {p.beta,
                               p.c,
                               p.mu,
                               p.m,
                               pt.m_infinity,
                               p.M,
                               p.grid.L,
                               static_cast<double>(p.grid.ell_g),
                               static_cast<double>(p.grid.N)};
    for (std::size_t i = 0; i < nmax; ++i)
      row.push_back(i < static_cast<std::size_t>(p.grid.N) ? p.q[i] : 0.0);
    t.rows.push_back(std::move(row));
  }
  csv::write(path, t);
}

}  // namespace driftlab::branch_io
