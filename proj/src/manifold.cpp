#include "soliton_forge/manifold.hpp"

#include <sstream>

namespace sforge {

std::string ManifoldSpec::coordinate_name(int i) const {
  if (i >= 0 && i < static_cast<int>(coordinate_names.size())) return coordinate_names[static_cast<std::size_t>(i)];
  return "x" + std::to_string(i + 1);
}

std::vector<std::string> default_coordinate_names(int n) {
  std::vector<std::string> names;
  for (int i = 0; i < 2 * n; ++i) names.push_back("x" + std::to_string(i + 1));
  names.emplace_back("t");
  return names;
}

std::vector<Jet3> seed_coordinates(const Point& p) {
  std::vector<Jet3> x;
  x.reserve(static_cast<std::size_t>(p.dim()));
  for (int a = 0; a < p.dim(); ++a) x.push_back(Jet3::variable(p.dim(), p[a], a));
  return x;
}

namespace {

std::string describe_point(const Point& p, std::span<const std::string> names) {
  std::ostringstream os;
  os.precision(17);
  os << "(";
  for (int a = 0; a < p.dim(); ++a) {
    if (a) os << ", ";
    if (a < static_cast<int>(names.size())) os << names[static_cast<std::size_t>(a)] << "=";
    os << p[a];
  }
  os << ")";
  return os.str();
}

[[noreturn]] void rethrow_named(const DomainError& e, const Point& p, std::span<const std::string> names) {
  std::string msg = e.what();
  if (!e.coordinates().empty()) {
    msg += "; argument depends on ";
    for (std::size_t i = 0; i < e.coordinates().size(); ++i) {
      const int c = e.coordinates()[i];
      if (i) msg += ", ";
      msg += c < static_cast<int>(names.size()) ? names[static_cast<std::size_t>(c)] : "x" + std::to_string(c + 1);
    }
  }
  msg += " at " + describe_point(p, names);
  throw DomainError(msg, e.coordinates());
}

}  // namespace

void require_admitted(const ManifoldSpec& m, const Point& p) {
  if (p.dim() != m.dim())
    throw DomainError("point has " + std::to_string(p.dim()) + " coordinates, chart dimension is " +
                      std::to_string(m.dim()));
  if (m.domain_guard) {
    if (auto why = m.domain_guard(p)) throw DomainError(*why + " at " + describe_point(p, m.coordinate_names));
  }
}

Jet3 evaluate_jet(const ScalarField& field, const Point& p, std::span<const std::string> names) {
  const auto x = seed_coordinates(p);
  try {
    return field(x);
  } catch (const DomainError& e) {
    rethrow_named(e, p, names);
  }
}

Tensor<Jet3> evaluate_field(const TensorField& field, const Point& p, std::span<const std::string> names) {
  const auto x = seed_coordinates(p);
  try {
    return field(x);
  } catch (const DomainError& e) {
    rethrow_named(e, p, names);
  }
}

TensorField constant_field(TensorComponents value) {
  return [value = std::move(value)](CoordinateJets x) {
    const int dim = static_cast<int>(x.size());
    Tensor<Jet3> out(value.valence(), dim, Jet3(dim));
    for (std::size_t a = 0; a < value.size(); ++a) out.data()[a] = Jet3(dim, value.data()[a]);
    return out;
  };
}

TensorField scaled_field(TensorField field, double s) {
  return [field = std::move(field), s](CoordinateJets x) { return field(x) *= s; };
}

TensorField vertical_potential(const ManifoldSpec& m, double k) { return scaled_field(m.xi, k); }

}  // namespace sforge
