#include "qrom/artifacts.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>

#include "qrom/errors.hpp"

namespace qrom::io {

namespace {

static_assert(std::endian::native == std::endian::little ||
                  std::endian::native == std::endian::big,
              "mixed-endian platforms are not supported");

template <typename T>
T to_little(T value) {
  if constexpr (std::endian::native == std::endian::big) {
    auto bytes = std::bit_cast<std::array<unsigned char, sizeof(T)>>(value);
    std::reverse(bytes.begin(), bytes.end());
    return std::bit_cast<T>(bytes);
  } else {
    return value;
  }
}

template <typename T>
void put(std::ostream& out, T value) {
  const T le = to_little(value);
  out.write(reinterpret_cast<const char*>(&le), sizeof(T));
}

template <typename T>
T get(std::istream& in, const std::filesystem::path& path) {
  T raw;
  if (!in.read(reinterpret_cast<char*>(&raw), sizeof(T)))
    throw IoError("truncated artifact: " + path.string());
  return to_little(raw);
}

void check_magic(std::istream& in, const char* magic, const std::filesystem::path& path) {
  char buf[4];
  if (!in.read(buf, 4) || std::memcmp(buf, magic, 4) != 0)
    throw IoError(path.string() + ": expected magic \"" + std::string(magic, 4) + "\"");
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return in;
}

void put_matrix(std::ostream& out, const Eigen::MatrixXd& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) put<double>(out, m(r, c));
}

Eigen::MatrixXd get_matrix(std::istream& in, Eigen::Index n, const std::filesystem::path& path) {
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index r = 0; r < n; ++r)
    for (Eigen::Index c = 0; c < n; ++c) m(r, c) = get<double>(in, path);
  return m;
}

}  // namespace

std::string format_double(double value) {
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), res.ptr);
}

void write_atomic(const std::filesystem::path& path,
                  const std::function<void(std::ostream&)>& writer) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    writer(out);
    out.flush();
    if (!out) throw IoError("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename " + tmp.string() + ": " + ec.message());
}

void write_qwf1(const std::filesystem::path& path, int nx, int ny,
                const Eigen::VectorXd& scalars, const Eigen::MatrixXd& states) {
  if (states.rows() != static_cast<Eigen::Index>(nx) * ny || states.cols() != scalars.size())
    throw IoError("QWF1: state matrix does not match nx*ny x nstates");
  write_atomic(path, [&](std::ostream& out) {
    out.write("QWF1", 4);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(nx));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(ny));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(states.cols()));
    for (Eigen::Index s = 0; s < states.cols(); ++s) {
      put<double>(out, scalars[s]);
      for (Eigen::Index p = 0; p < states.rows(); ++p) put<double>(out, states(p, s));
    }
  });
}

WavefunctionDump read_qwf1(const std::filesystem::path& path) {
  auto in = open_input(path);
  check_magic(in, "QWF1", path);
  WavefunctionDump d;
  d.nx = get<std::uint32_t>(in, path);
  d.ny = get<std::uint32_t>(in, path);
  const auto n = get<std::uint32_t>(in, path);
  const auto points = static_cast<Eigen::Index>(d.nx) * d.ny;
  d.scalars.resize(n);
  d.states.resize(points, n);
  for (Eigen::Index s = 0; s < n; ++s) {
    d.scalars[s] = get<double>(in, path);
    for (Eigen::Index p = 0; p < points; ++p) d.states(p, s) = get<double>(in, path);
  }
  return d;
}

void write_podh(const std::filesystem::path& path, const ReducedModel& model) {
  write_atomic(path, [&](std::ostream& out) {
    out.write("PODH", 4);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(model.max_modes()));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(model.potential_terms.size()));
    put_matrix(out, model.kinetic);
    put_matrix(out, model.potential_base);
    for (const auto& u : model.potential_terms) put_matrix(out, u);
    put_matrix(out, model.boundary);
  });
}

ReducedModel read_podh(const std::filesystem::path& path) {
  auto in = open_input(path);
  check_magic(in, "PODH", path);
  const auto m = static_cast<Eigen::Index>(get<std::uint32_t>(in, path));
  const auto terms = get<std::uint32_t>(in, path);
  ReducedModel model;
  model.kinetic = get_matrix(in, m, path);
  model.potential_base = get_matrix(in, m, path);
  for (std::uint32_t k = 0; k < terms; ++k) {
    model.potential_terms.push_back(get_matrix(in, m, path));
    model.term_names.push_back("term" + std::to_string(k));
  }
  model.boundary = get_matrix(in, m, path);
  return model;
}

void write_energies_csv(std::ostream& out, const Eigen::VectorXd& energies) {
  out << "state,energy_ev\n";
  for (Eigen::Index i = 0; i < energies.size(); ++i)
    out << (i + 1) << ',' << format_double(energies[i]) << '\n';
}

void write_states_csv(std::ostream& out, const Grid& grid, const Eigen::MatrixXd& states) {
  out << "x_nm,y_nm";
  for (Eigen::Index s = 0; s < states.cols(); ++s) out << ",psi" << (s + 1);
  out << '\n';
  for (int j = 0; j < grid.ny(); ++j)
    for (int i = 0; i < grid.nx(); ++i) {
      const auto p = static_cast<Eigen::Index>(grid.index(i, j));
      out << format_double(grid.x(i)) << ',' << format_double(grid.y(j));
      for (Eigen::Index s = 0; s < states.cols(); ++s) out << ',' << format_double(states(p, s));
      out << '\n';
    }
}

void write_spectrum_csv(std::ostream& out, const Eigen::VectorXd& spectrum) {
  out << "mode,lambda,lambda_over_lambda1\n";
  const double first = spectrum.size() > 0 ? spectrum[0] : 1.0;
  for (Eigen::Index i = 0; i < spectrum.size(); ++i)
    out << (i + 1) << ',' << format_double(spectrum[i]) << ','
        << format_double(first > 0.0 ? spectrum[i] / first : 0.0) << '\n';
}

void write_coefficients_csv(std::ostream& out, const ReducedSolution& sol, int n_states) {
  out << "state,energy_ev";
  for (int j = 0; j < sol.modes; ++j) out << ",a" << (j + 1);
  out << '\n';
  const int n = std::min(n_states, sol.modes);
  for (int s = 0; s < n; ++s) {
    out << (s + 1) << ',' << format_double(sol.energies[s]);
    for (int j = 0; j < sol.modes; ++j) out << ',' << format_double(sol.coeffs(j, s));
    out << '\n';
  }
}

}  // namespace qrom::io
