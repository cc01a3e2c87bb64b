#include "mflab/models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mflab::models {

DisorderLaw::DisorderLaw(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {
  if (atoms_.empty()) throw std::invalid_argument("disorder law: needs at least one atom");
  double total = 0.0;
  for (const auto& atom : atoms_) {
    const auto& v = atom.value;
    if (!std::isfinite(v.eta) || !std::isfinite(v.amplitude) || !std::isfinite(v.phase)) {
      throw std::invalid_argument("disorder law: atoms must have bounded (finite) values");
    }
    if (!(atom.weight > 0.0)) throw std::invalid_argument("disorder law: weights must be positive");
    total += atom.weight;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw std::invalid_argument("disorder law: weights must sum to 1");
  }
}

double DisorderLaw::max_amplitude() const {
  double m = 0.0;
  for (const auto& atom : atoms_) m = std::max(m, std::abs(atom.value.amplitude));
  return m;
}

double DisorderLaw::max_abs_eta() const {
  double m = 0.0;
  for (const auto& atom : atoms_) m = std::max(m, std::abs(atom.value.eta));
  return m;
}

std::size_t DisorderLaw::sample(double u) const {
  double cumulative = 0.0;
  for (std::size_t i = 0; i + 1 < atoms_.size(); ++i) {
    cumulative += atoms_[i].weight;
    if (u < cumulative) return i;
  }
  return atoms_.size() - 1;
}

double DisorderLaw::separation(std::size_t i) const {
  double best = std::numeric_limits<double>::infinity();
  const auto& a = atoms_[i].value;
  for (std::size_t j = 0; j < atoms_.size(); ++j) {
    if (j == i) continue;
    const auto& b = atoms_[j].value;
    best = std::min(best, std::hypot(a.eta - b.eta, a.amplitude - b.amplitude, a.phase - b.phase));
  }
  return best;
}

double ModelSpec::drift(double theta, const Disorder& w) const {
  return w.eta - drift_sine * std::sin(theta);
}

double ModelSpec::interaction(double theta, const Disorder& w, double other,
                              const Disorder& w_other) const {
  if (custom_kernel) return custom_kernel(theta, w, other, w_other);
  return -w.amplitude * w_other.amplitude * kernel.coupling *
         std::sin(theta - w.phase - other + w_other.phase - kernel.delta);
}

namespace {

void check_common(double coupling, double sigma) {
  if (!(coupling >= 0.0) || !std::isfinite(coupling)) {
    throw std::invalid_argument("model: coupling K must be finite and >= 0");
  }
  if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
    throw std::invalid_argument("model: sigma must be finite and >= 0");
  }
}

}  // namespace

ModelSpec make_kuramoto(double coupling, DisorderLaw disorder, double sigma) {
  check_common(coupling, sigma);
  for (const auto& atom : disorder.atoms()) {
    if (atom.value.amplitude != 1.0 || atom.value.phase != 0.0) {
      throw std::invalid_argument("kuramoto: disorder atoms carry only a frequency");
    }
  }
  ModelSpec spec;
  spec.kind = ModelKind::kuramoto;
  spec.kernel = {coupling, 0.0};
  spec.sigma = sigma;
  spec.disorder = std::move(disorder);
  spec.lip_drift = 0.0;
  spec.lip_kernel = coupling;
  spec.sup_kernel = coupling;
  spec.sup_drift = spec.disorder.max_abs_eta();
  return spec;
}

ModelSpec make_active_rotator(double a, double coupling, double sigma) {
  check_common(coupling, sigma);
  if (!std::isfinite(a)) throw std::invalid_argument("active rotator: a must be finite");
  ModelSpec spec;
  spec.kind = ModelKind::active_rotator;
  spec.drift_sine = a;
  spec.kernel = {coupling, 0.0};
  spec.sigma = sigma;
  spec.disorder = DisorderLaw::single({1.0, 1.0, 0.0});
  spec.lip_drift = std::abs(a);
  spec.lip_kernel = coupling;
  spec.sup_kernel = coupling;
  spec.sup_drift = 1.0 + std::abs(a);
  return spec;
}

ModelSpec make_generalized_kuramoto(double coupling, double delta, DisorderLaw disorder,
                                    double sigma) {
  check_common(coupling, sigma);
  if (!std::isfinite(delta)) throw std::invalid_argument("generalized kuramoto: delta must be finite");
  ModelSpec spec;
  spec.kind = ModelKind::generalized;
  spec.kernel = {coupling, delta};
  spec.sigma = sigma;
  spec.disorder = std::move(disorder);
  const double amp = spec.disorder.max_amplitude();
  spec.lip_drift = 0.0;
  spec.lip_kernel = coupling * amp * amp;
  spec.sup_kernel = coupling * amp * amp;
  spec.sup_drift = spec.disorder.max_abs_eta();
  return spec;
}

ModelSpec make_custom(PairKernel kernel, double lip_kernel, double sup_kernel, double drift_sine,
                      DisorderLaw disorder, double sigma) {
  if (!kernel) throw std::invalid_argument("custom model: kernel must be callable");
  if (!(lip_kernel >= 0.0) || !(sup_kernel >= 0.0) || !std::isfinite(lip_kernel) ||
      !std::isfinite(sup_kernel)) {
    throw std::invalid_argument("custom model: declared constants must be finite and >= 0");
  }
  check_common(0.0, sigma);
  ModelSpec spec;
  spec.kind = ModelKind::custom;
  spec.custom_kernel = std::move(kernel);
  spec.drift_sine = drift_sine;
  spec.sigma = sigma;
  spec.disorder = std::move(disorder);
  spec.lip_drift = std::abs(drift_sine);
  spec.lip_kernel = lip_kernel;
  spec.sup_kernel = sup_kernel;
  spec.sup_drift = spec.disorder.max_abs_eta() + std::abs(drift_sine);
  return spec;
}

ModelConstants model_constants(const ModelSpec& spec) {
  const double c = std::max({2.0 * spec.lip_drift + 1.0, 2.0 * spec.lip_kernel * spec.lip_kernel,
                             4.0 * spec.sup_kernel * spec.sup_kernel});
  return {c, 3.0 * c};
}

}  // namespace mflab::models
