#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "liveprint/features.hpp"

namespace liveprint {

enum class Label { Real, Fake };

std::string_view label_name(Label l);
/// Accepts "real" or "fake"; throws BadLabel.
Label parse_label(std::string_view s);

struct LabeledSample {
  std::string id;
  std::string sensor;
  Label label = Label::Real;
  std::optional<std::string> material;  // informational, never read by the classifier
  FeatureVector features;
};

/// Non-empty selection of quality measures, bit i = feature i in canonical order.
class SubsetMask {
 public:
  static SubsetMask from_bits(std::uint16_t bits);
  static SubsetMask all();
  /// Comma-separated feature names, e.g. "Q_E,Q_STD".
  static SubsetMask parse(std::string_view names);

  std::uint16_t bits() const noexcept { return bits_; }
  bool contains(int feature) const noexcept { return (bits_ >> feature) & 1U; }
  int cardinality() const noexcept;
  std::vector<int> indices() const;
  /// "0100010000" style flags in canonical feature order.
  std::string flags() const;
  /// "Q_E,Q_STD" style.
  std::string names() const;

  friend bool operator==(const SubsetMask&, const SubsetMask&) = default;

 private:
  explicit SubsetMask(std::uint16_t bits) : bits_(bits) {}
  std::uint16_t bits_ = 1;
};

/// Selected components of a feature vector.
Eigen::VectorXd project(const FeatureVector& v, const SubsetMask& subset);

/// Two Gaussian classes sharing one covariance matrix.
struct GaussianClassModel {
  SubsetMask subset = SubsetMask::all();
  Eigen::VectorXd mu_real;
  Eigen::VectorXd mu_fake;
  Eigen::MatrixXd sigma_pooled;
  double prior_real = 0.5;
  double prior_fake = 0.5;
  bool regularized = false;
  // Linear discriminant derived from the parameters above.
  Eigen::VectorXd weights;  // sigma^-1 (mu_real - mu_fake)
  double bias = 0.0;        // log(prior_real / prior_fake) - weights . midpoint

  /// Validates and regularizes sigma, then derives the discriminant.
  static GaussianClassModel from_parameters(SubsetMask subset, Eigen::VectorXd mu_real, Eigen::VectorXd mu_fake,
                                            Eigen::MatrixXd sigma, double prior_real);
};

struct Prediction {
  Label label = Label::Fake;
  double posterior_real = 0.5;
  double posterior_fake = 0.5;
};

inline constexpr double kTieTolerance = 1e-12;

/// Throws DegenerateTraining when a class has fewer than two samples and
/// ZeroVariance when the pooled covariance stays singular after the ridge.
GaussianClassModel fit_lda(std::span<const LabeledSample> samples, const SubsetMask& subset);

Prediction predict(const GaussianClassModel& model, const FeatureVector& features);
/// Decision for an already projected point.
Prediction predict_projected(const GaussianClassModel& model, const Eigen::VectorXd& x);

struct EvaluationResult {
  double far = 0.0;  // percent of fakes accepted as real
  double frr = 0.0;  // percent of reals rejected as fake
  double ace = 0.0;  // (far + frr) / 2
  int n_real = 0;
  int n_fake = 0;
  int false_accepts = 0;
  int false_rejects = 0;
};

double compute_ace(double far, double frr);
EvaluationResult evaluation_from_counts(int n_real, int n_fake, int false_accepts, int false_rejects);

/// Leave-one-out decisions using running class statistics with a rank-one
/// downdate per held-out sample.
std::vector<Label> loo_decisions(std::span<const LabeledSample> samples, const SubsetMask& subset);
/// Same protocol, refitting the model from scratch for every held-out sample.
std::vector<Label> loo_decisions_naive(std::span<const LabeledSample> samples, const SubsetMask& subset);

/// Requires one sensor and at least three samples per class.
EvaluationResult loo_evaluate(std::span<const LabeledSample> samples, const SubsetMask& subset);
EvaluationResult loo_evaluate_naive(std::span<const LabeledSample> samples, const SubsetMask& subset);

/// Class sums and scatter over all ten features, shared by every subset of a
/// leave-one-out search.
class LooStatistics {
 public:
  explicit LooStatistics(std::span<const LabeledSample> samples);

  std::span<const LabeledSample> samples() const noexcept { return samples_; }
  int n_real() const noexcept { return n_[0]; }
  int n_fake() const noexcept { return n_[1]; }

  /// Decision for sample i with that sample removed from training.
  Label held_out_decision(std::size_t i, const SubsetMask& subset) const;
  EvaluationResult evaluate(const SubsetMask& subset) const;

 private:
  std::span<const LabeledSample> samples_;
  std::vector<Eigen::Matrix<double, kFeatureCount, 1>> x_;
  int n_[2] = {0, 0};
  Eigen::Matrix<double, kFeatureCount, 1> mean_[2];
  Eigen::Matrix<double, kFeatureCount, kFeatureCount> scatter_[2];
};

}  // namespace liveprint
