#include "lacuna/discrepancy.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace lacuna {

namespace {

void check_same_width(const InstanceView& a, const InstanceView& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("discrepancy: instance views have different attribute counts");
}

}  // namespace

DiscrepancyModel::DiscrepancyModel(std::vector<double> weights, double beta, double d_max)
    : weights_(std::move(weights)), beta_(beta), d_max_(d_max) {
  if (!(beta_ > 0.0 && beta_ < 1.0))
    throw std::invalid_argument("DiscrepancyModel: beta must lie strictly inside (0,1)");
  if (!(d_max_ > 0.0)) throw std::invalid_argument("DiscrepancyModel: d_max must be positive");
  if (weights_.empty()) throw std::invalid_argument("DiscrepancyModel: no attributes");
  weight_sum_ = 0.0;
  for (double w : weights_) {
    if (!(w >= 0.0)) throw std::invalid_argument("DiscrepancyModel: negative weight");
    weight_sum_ += w;
  }
  if (!(weight_sum_ > 0.0))
    throw std::invalid_argument("DiscrepancyModel: all attribute weights are zero");
}

double observed_distance(const InstanceView& a, const InstanceView& b) {
  check_same_width(a, b);
  double ss = 0.0;
  for (std::size_t l = 0; l < a.size(); ++l) {
    if (a.observed(l) && b.observed(l)) {
      const double d = a.values[l] - b.values[l];
      ss += d * d;
    }
  }
  return std::sqrt(ss);
}

double missing_fraction(const InstanceView& a, const InstanceView& b) {
  check_same_width(a, b);
  if (a.size() == 0) return 0.0;
  std::size_t shared = 0;
  for (std::size_t l = 0; l < a.size(); ++l)
    if (a.observed(l) && b.observed(l)) ++shared;
  return static_cast<double>(a.size() - shared) / static_cast<double>(a.size());
}

double pdm(const InstanceView& a, const InstanceView& b) {
  return observed_distance(a, b) + missing_fraction(a, b);
}

double sdm(const InstanceView& a, const InstanceView& b) {
  const double d = observed_distance(a, b);
  return std::sqrt(d * d + missing_fraction(a, b));
}

double penalty(const InstanceView& a, const InstanceView& b, const DiscrepancyModel& model) {
  check_same_width(a, b);
  if (a.size() != model.attribute_count())
    throw std::invalid_argument("penalty: model fitted for a different attribute count");
  double missing = 0.0;
  for (std::size_t l = 0; l < a.size(); ++l)
    if (!(a.observed(l) && b.observed(l))) missing += model.weights()[l];
  return missing / model.weight_sum();
}

double awpd(const InstanceView& a, const InstanceView& b, const DiscrepancyModel& model) {
  const double d = observed_distance(a, b);
  const double q = penalty(a, b, model);
  return (1.0 - model.beta()) * d / model.d_max() + model.beta() * q;
}

DiscrepancyModel fit_discrepancy_model(const ObservedTable& table, double beta) {
  const std::size_t n = table.rows(), m = table.cols();
  if (n < 2) throw std::invalid_argument("fit_discrepancy_model: need at least two instances");
  if (!(beta > 0.0 && beta < 1.0))
    throw std::invalid_argument("fit_discrepancy_model: beta must lie strictly inside (0,1)");

  std::vector<double> weights(m, 0.0);
  for (std::size_t l = 0; l < m; ++l) {
    std::size_t observers = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (table.observed(i, l)) ++observers;
    weights[l] = static_cast<double>(observers) / static_cast<double>(n);
  }

  double d_max = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto vi = table.row(i);
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = observed_distance(vi, table.row(j));
      if (d > d_max) d_max = d;
    }
  }
  if (d_max <= 0.0) d_max = 1.0;

  return DiscrepancyModel(std::move(weights), beta, d_max);
}

double default_beta(const ObservedTable& table) {
  return std::clamp(table.missing_fraction(), 0.1, 0.25);
}

void save_model(const DiscrepancyModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_model: cannot write " + path);
  char buf[64];
  out << "lacuna discrepancy model v1\n";
  std::snprintf(buf, sizeof(buf), "%.17g", model.beta());
  out << "beta " << buf << '\n';
  std::snprintf(buf, sizeof(buf), "%.17g", model.d_max());
  out << "d_max " << buf << '\n';
  out << "weights";
  for (double w : model.weights()) {
    std::snprintf(buf, sizeof(buf), "%.17g", w);
    out << ' ' << buf;
  }
  out << '\n';
  if (!out) throw std::runtime_error("save_model: write failed for " + path);
}

DiscrepancyModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_model: cannot open " + path);
  std::string header;
  std::getline(in, header);
  if (header != "lacuna discrepancy model v1")
    throw std::runtime_error("load_model: unrecognized header in " + path);

  double beta = 0.0, d_max = 0.0;
  std::vector<double> weights;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ss(line);
    std::string key;
    ss >> key;
    if (key == "beta") {
      ss >> beta;
    } else if (key == "d_max") {
      ss >> d_max;
    } else if (key == "weights") {
      double w;
      while (ss >> w) weights.push_back(w);
    } else if (!key.empty()) {
      throw std::runtime_error("load_model: unknown key \"" + key + "\" in " + path);
    }
  }
  return DiscrepancyModel(std::move(weights), beta, d_max);
}

DiscrepancyCache::DiscrepancyCache(const ObservedTable& table, const DiscrepancyModel& model)
    : n_(table.rows()), values_(table.rows() * table.rows(), 0.0) {
  for (std::size_t i = 0; i < n_; ++i) {
    const auto vi = table.row(i);
    for (std::size_t j = i; j < n_; ++j) {
      const double d = awpd(vi, table.row(j), model);
      values_[i * n_ + j] = d;
      values_[j * n_ + i] = d;
    }
  }
}

}  // namespace lacuna
