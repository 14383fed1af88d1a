#include "rig/pmf.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "rig/error.hpp"

namespace rig {

namespace {

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) fields.push_back(field);
  return fields;
}

}  // namespace

double Pmf::core_mass() const { return std::accumulate(probs.begin(), probs.end(), 0.0); }

double Pmf::mean() const {
  double m = 0.0;
  for (std::size_t r = 0; r < probs.size(); ++r) m += static_cast<double>(r) * probs[r];
  return m;
}

Pmf Pmf::truncated(std::size_t r_max) const {
  if (r_max + 1 >= probs.size()) return *this;
  Pmf out{{probs.begin(), probs.begin() + static_cast<std::ptrdiff_t>(r_max + 1)}, residual, label};
  for (std::size_t r = r_max + 1; r < probs.size(); ++r) out.residual += probs[r];
  return out;
}

Pmf Pmf::resized(std::size_t size) const {
  if (size == 0) throw Error(ErrorCode::ShapeMismatch, "cannot resize a pmf to zero entries");
  if (size <= probs.size()) return truncated(size - 1);
  Pmf out = *this;
  out.probs.resize(size, 0.0);
  return out;
}

Pmf Pmf::point_mass(std::size_t r, std::string label) {
  Pmf out{std::vector<double>(r + 1, 0.0), 0.0, std::move(label)};
  out.probs[r] = 1.0;
  return out;
}

Pmf Pmf::from_counts(std::span<const std::uint64_t> counts, std::string label) {
  const double total = static_cast<double>(std::accumulate(counts.begin(), counts.end(), std::uint64_t{0}));
  Pmf out{std::vector<double>(counts.size(), 0.0), 0.0, std::move(label)};
  if (total == 0.0) return out;
  for (std::size_t r = 0; r < counts.size(); ++r) out.probs[r] = static_cast<double>(counts[r]) / total;
  return out;
}

double JointPmf::core_mass() const { return std::accumulate(probs.begin(), probs.end(), 0.0); }

Pmf JointPmf::first_marginal() const {
  Pmf out{std::vector<double>(dim, 0.0), residual, label.empty() ? std::string{} : label + "_marginal"};
  for (std::size_t k1 = 0; k1 < dim; ++k1)
    for (std::size_t k2 = 0; k2 < dim; ++k2) out.probs[k1] += (*this)(k1, k2);
  return out;
}

JointPmf JointPmf::truncated(std::size_t k_max) const {
  if (k_max + 1 >= dim) return *this;
  JointPmf out(k_max + 1, label);
  out.residual = residual;
  for (std::size_t k1 = 0; k1 < dim; ++k1) {
    for (std::size_t k2 = 0; k2 < dim; ++k2) {
      if (k1 <= k_max && k2 <= k_max)
        out.at(k1, k2) = (*this)(k1, k2);
      else
        out.residual += (*this)(k1, k2);
    }
  }
  return out;
}

double QSeq::core_sum() const { return std::accumulate(q.begin(), q.end(), 0.0); }

TvResult tv_distance(const Pmf& p, const Pmf& q) {
  if (p.size() != q.size()) {
    std::ostringstream msg;
    msg << "pmfs have " << p.size() << " and " << q.size() << " entries";
    throw Error(ErrorCode::ShapeMismatch, msg.str());
  }
  double l1 = 0.0;
  for (std::size_t r = 0; r < p.size(); ++r) l1 += std::abs(p.probs[r] - q.probs[r]);
  return {0.5 * l1, 0.5 * l1 + 0.5 * (p.residual + q.residual)};
}

TvResult tv_distance(const JointPmf& p, const JointPmf& q) {
  if (p.dim != q.dim) {
    std::ostringstream msg;
    msg << "joint pmfs have k_max " << p.k_max() << " and " << q.k_max();
    throw Error(ErrorCode::ShapeMismatch, msg.str());
  }
  double l1 = 0.0;
  for (std::size_t i = 0; i < p.probs.size(); ++i) l1 += std::abs(p.probs[i] - q.probs[i]);
  return {0.5 * l1, 0.5 * l1 + 0.5 * (p.residual + q.residual)};
}

void write_csv(std::ostream& out, const Pmf& pmf) {
  out << "r,prob\n";
  for (std::size_t r = 0; r < pmf.size(); ++r) out << r << ',' << format_double(pmf.probs[r]) << '\n';
}

void write_csv(std::ostream& out, const JointPmf& joint) {
  out << "k1,k2,prob\n";
  for (std::size_t k1 = 0; k1 < joint.dim; ++k1)
    for (std::size_t k2 = 0; k2 < joint.dim; ++k2)
      out << k1 << ',' << k2 << ',' << format_double(joint(k1, k2)) << '\n';
}

Pmf read_pmf_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "r,prob") throw Error(ErrorCode::ShapeMismatch, "expected header 'r,prob'");
  Pmf out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 2) throw Error(ErrorCode::ShapeMismatch, "bad pmf csv row '" + line + "'");
    const auto r = std::stoul(fields[0]);
    if (r != out.probs.size()) throw Error(ErrorCode::ShapeMismatch, "pmf csv rows must be dense and ordered");
    out.probs.push_back(std::stod(fields[1]));
  }
  out.residual = std::max(0.0, 1.0 - out.core_mass());
  return out;
}

JointPmf read_joint_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "k1,k2,prob")
    throw Error(ErrorCode::ShapeMismatch, "expected header 'k1,k2,prob'");
  std::vector<double> values;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 3) throw Error(ErrorCode::ShapeMismatch, "bad joint csv row '" + line + "'");
    values.push_back(std::stod(fields[2]));
  }
  const auto dim = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(values.size()))));
  if (dim * dim != values.size()) throw Error(ErrorCode::ShapeMismatch, "joint csv is not a square table");
  JointPmf out(dim);
  out.probs = std::move(values);
  out.residual = std::max(0.0, 1.0 - out.core_mass());
  return out;
}

nlohmann::json to_json(const Pmf& pmf) {
  return {{"label", pmf.label}, {"probs", pmf.probs}, {"residual", pmf.residual}};
}

nlohmann::json to_json(const JointPmf& joint) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t k1 = 0; k1 < joint.dim; ++k1) {
    std::vector<double> row(joint.probs.begin() + static_cast<std::ptrdiff_t>(k1 * joint.dim),
                            joint.probs.begin() + static_cast<std::ptrdiff_t>((k1 + 1) * joint.dim));
    rows.push_back(std::move(row));
  }
  return {{"label", joint.label}, {"k_max", joint.k_max()}, {"probs", std::move(rows)}, {"residual", joint.residual}};
}

nlohmann::json to_json(const QSeq& q) { return {{"q", q.q}, {"residual", q.residual}}; }

Pmf pmf_from_json(const nlohmann::json& j) {
  Pmf out;
  out.probs = j.at("probs").get<std::vector<double>>();
  out.residual = j.at("residual").get<double>();
  out.label = j.value("label", std::string{});
  return out;
}

JointPmf joint_from_json(const nlohmann::json& j) {
  const auto rows = j.at("probs").get<std::vector<std::vector<double>>>();
  JointPmf out(rows.size(), j.value("label", std::string{}));
  for (std::size_t k1 = 0; k1 < rows.size(); ++k1) {
    if (rows[k1].size() != rows.size()) throw Error(ErrorCode::ShapeMismatch, "joint pmf rows must be square");
    for (std::size_t k2 = 0; k2 < rows.size(); ++k2) out.at(k1, k2) = rows[k1][k2];
  }
  out.residual = j.at("residual").get<double>();
  return out;
}

}  // namespace rig
