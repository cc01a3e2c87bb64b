#pragma once

#include <cstddef>
#include <functional>
#include <variant>
#include <vector>

namespace mflab::models {

/// One disorder value omega = (eta, A, alpha). Kuramoto uses eta as the
/// natural frequency with A = 1, alpha = 0.
struct Disorder {
  double eta = 0.0;
  double amplitude = 1.0;
  double phase = 0.0;
  friend bool operator==(const Disorder&, const Disorder&) = default;
};

struct Atom {
  Disorder value;
  double weight = 1.0;
};

/// Finite disorder law; weights positive and summing to 1 within 1e-12.
class DisorderLaw {
 public:
  DisorderLaw() : DisorderLaw(std::vector<Atom>{{Disorder{}, 1.0}}) {}
  explicit DisorderLaw(std::vector<Atom> atoms);

  static DisorderLaw single(Disorder value = {}) { return DisorderLaw({{value, 1.0}}); }

  const std::vector<Atom>& atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }
  const Disorder& operator[](std::size_t i) const { return atoms_[i].value; }
  double weight(std::size_t i) const { return atoms_[i].weight; }

  double max_amplitude() const;
  double max_abs_eta() const;

  /// Atom index for a uniform draw u in [0, 1) (inverse CDF).
  std::size_t sample(double u) const;

  /// Smallest distance from atom i to any other atom in the Euclidean metric
  /// on (eta, A, alpha); +inf for a single atom.
  double separation(std::size_t i) const;

 private:
  std::vector<Atom> atoms_;
};

enum class ModelKind { kuramoto, active_rotator, generalized, custom };

/// Gamma(t, w, t', w') = -A A' K sin(t - alpha - t' + alpha' - delta).
struct TrigKernel {
  double coupling = 0.0;
  double delta = 0.0;
};

using PairKernel = std::function<double(double, const Disorder&, double, const Disorder&)>;

/// Drift F(t, w) = eta(w) - a sin(t), a single-harmonic interaction kernel,
/// noise sigma and a finite disorder law, together with the regularity
/// constants the proximity bound needs.
struct ModelSpec {
  ModelKind kind = ModelKind::kuramoto;
  double drift_sine = 0.0;  // a
  TrigKernel kernel;
  PairKernel custom_kernel;  // set only for ModelKind::custom
  double sigma = 1.0;
  DisorderLaw disorder;

  double lip_drift = 0.0;   // L_F
  double lip_kernel = 0.0;  // L_Gamma
  double sup_kernel = 0.0;  // ||Gamma||_inf
  double sup_drift = 0.0;   // ||F||_inf, informational

  bool trigonometric() const { return kind != ModelKind::custom; }
  double drift(double theta, const Disorder& w) const;
  double interaction(double theta, const Disorder& w, double other, const Disorder& w_other) const;
};

ModelSpec make_kuramoto(double coupling, DisorderLaw disorder, double sigma = 1.0);
ModelSpec make_active_rotator(double a, double coupling, double sigma = 1.0);
ModelSpec make_generalized_kuramoto(double coupling, double delta, DisorderLaw disorder,
                                    double sigma = 1.0);

/// Arbitrary bounded Lipschitz kernel with caller-declared constants. Usable
/// by the particle engine only; the density solver and the coupled
/// construction reject it.
ModelSpec make_custom(PairKernel kernel, double lip_kernel, double sup_kernel, double drift_sine,
                      DisorderLaw disorder, double sigma = 1.0);

struct ModelConstants {
  double c = 0.0;  // max(2 L_F + 1, 2 L_Gamma^2, 4 ||Gamma||^2)
  double C = 0.0;  // 3 c
};

ModelConstants model_constants(const ModelSpec& spec);

// Initial law nu_0 = (phase law) x (disorder law).

struct UniformPhase {};
struct PointMass {
  double at = 0.0;
};
struct WrappedGaussian {
  double mean = 0.0;
  double spread = 1.0;
};
using PhaseLaw = std::variant<UniformPhase, PointMass, WrappedGaussian>;

struct InitialLaw {
  PhaseLaw phase = UniformPhase{};
  DisorderLaw disorder;
};

}  // namespace mflab::models
