#include "liveprint/classifier.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "liveprint/error.hpp"

namespace liveprint {

std::string_view label_name(Label l) { return l == Label::Real ? "real" : "fake"; }

Label parse_label(std::string_view s) {
  if (s == "real") return Label::Real;
  if (s == "fake") return Label::Fake;
  throw Error(ErrorCode::BadLabel, "label must be 'real' or 'fake', got '" + std::string(s) + "'");
}

SubsetMask SubsetMask::from_bits(std::uint16_t bits) {
  if (bits == 0 || bits >= (1U << kFeatureCount)) {
    throw Error(ErrorCode::BadFeatureName, "subset must select between 1 and 10 features");
  }
  return SubsetMask(bits);
}

SubsetMask SubsetMask::all() { return SubsetMask((1U << kFeatureCount) - 1); }

SubsetMask SubsetMask::parse(std::string_view names) {
  std::uint16_t bits = 0;
  std::size_t start = 0;
  while (start <= names.size()) {
    std::size_t end = names.find(',', start);
    if (end == std::string_view::npos) end = names.size();
    std::string_view token = names.substr(start, end - start);
    while (!token.empty() && token.front() == ' ') token.remove_prefix(1);
    while (!token.empty() && token.back() == ' ') token.remove_suffix(1);
    if (!token.empty()) bits |= static_cast<std::uint16_t>(1U << static_cast<int>(parse_feature_name(token)));
    start = end + 1;
  }
  if (bits == 0) throw Error(ErrorCode::BadFeatureName, "empty feature subset");
  return SubsetMask(bits);
}

int SubsetMask::cardinality() const noexcept { return std::popcount(bits_); }

std::vector<int> SubsetMask::indices() const {
  std::vector<int> out;
  for (int i = 0; i < kFeatureCount; ++i)
    if (contains(i)) out.push_back(i);
  return out;
}

std::string SubsetMask::flags() const {
  std::string s(kFeatureCount, '0');
  for (int i = 0; i < kFeatureCount; ++i)
    if (contains(i)) s[i] = '1';
  return s;
}

std::string SubsetMask::names() const {
  std::string s;
  for (int i : indices()) {
    if (!s.empty()) s += ',';
    s += feature_name(i);
  }
  return s;
}

Eigen::VectorXd project(const FeatureVector& v, const SubsetMask& subset) {
  const auto idx = subset.indices();
  Eigen::VectorXd out(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k) out[static_cast<Eigen::Index>(k)] = v.values[idx[k]];
  return out;
}

namespace {

bool singular(const Eigen::MatrixXd& sigma) {
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sigma, Eigen::EigenvaluesOnly);
  const double hi = eig.eigenvalues().maxCoeff();
  const double lo = eig.eigenvalues().minCoeff();
  return !(hi > 0.0) || lo <= 1e-12 * hi;
}

}  // namespace

GaussianClassModel GaussianClassModel::from_parameters(SubsetMask subset, Eigen::VectorXd mu_real,
                                                       Eigen::VectorXd mu_fake, Eigen::MatrixXd sigma,
                                                       double prior_real) {
  const Eigen::Index d = sigma.rows();
  if (sigma.cols() != d || mu_real.size() != d || mu_fake.size() != d || d != subset.cardinality()) {
    throw Error(ErrorCode::BadSpec, "model dimensions do not match the subset");
  }
  if (!(prior_real > 0.0 && prior_real < 1.0)) throw Error(ErrorCode::BadSpec, "prior must be in (0, 1)");

  GaussianClassModel m;
  m.subset = subset;
  m.mu_real = std::move(mu_real);
  m.mu_fake = std::move(mu_fake);
  m.sigma_pooled = 0.5 * (sigma + sigma.transpose());
  m.prior_real = prior_real;
  m.prior_fake = 1.0 - prior_real;

  if (singular(m.sigma_pooled)) {
    const double eps = 1e-6 * m.sigma_pooled.trace() / static_cast<double>(d);
    m.sigma_pooled.diagonal().array() += eps;
    m.regularized = true;
    if (!(eps > 0.0) || singular(m.sigma_pooled)) {
      throw Error(ErrorCode::ZeroVariance, "pooled covariance is singular for subset " + subset.names());
    }
  }

  const Eigen::LLT<Eigen::MatrixXd> llt(m.sigma_pooled);
  m.weights = llt.solve(m.mu_real - m.mu_fake);
  m.bias = std::log(m.prior_real / m.prior_fake) - m.weights.dot(0.5 * (m.mu_real + m.mu_fake));
  return m;
}

GaussianClassModel fit_lda(std::span<const LabeledSample> samples, const SubsetMask& subset) {
  const Eigen::Index d = subset.cardinality();
  Eigen::VectorXd sum[2] = {Eigen::VectorXd::Zero(d), Eigen::VectorXd::Zero(d)};
  int n[2] = {0, 0};
  for (const auto& s : samples) {
    const int c = s.label == Label::Real ? 0 : 1;
    sum[c] += project(s.features, subset);
    ++n[c];
  }
  if (n[0] < 2 || n[1] < 2) {
    throw Error(ErrorCode::DegenerateTraining, "each class needs at least 2 samples (real " + std::to_string(n[0]) +
                                                   ", fake " + std::to_string(n[1]) + ")");
  }
  const Eigen::VectorXd mean[2] = {sum[0] / n[0], sum[1] / n[1]};
  Eigen::MatrixXd scatter = Eigen::MatrixXd::Zero(d, d);
  for (const auto& s : samples) {
    const Eigen::VectorXd v = project(s.features, subset) - mean[s.label == Label::Real ? 0 : 1];
    scatter += v * v.transpose();
  }
  const double total = n[0] + n[1];
  return GaussianClassModel::from_parameters(subset, mean[0], mean[1], scatter / (total - 2.0), n[0] / total);
}

Prediction predict_projected(const GaussianClassModel& model, const Eigen::VectorXd& x) {
  const double score = model.weights.dot(x) + model.bias;
  Prediction p;
  p.posterior_real = 1.0 / (1.0 + std::exp(-score));
  p.posterior_fake = 1.0 / (1.0 + std::exp(score));
  p.label = (std::abs(p.posterior_real - 0.5) <= kTieTolerance || p.posterior_real < 0.5) ? Label::Fake : Label::Real;
  return p;
}

Prediction predict(const GaussianClassModel& model, const FeatureVector& features) {
  return predict_projected(model, project(features, model.subset));
}

double compute_ace(double far, double frr) { return (far + frr) / 2.0; }

EvaluationResult evaluation_from_counts(int n_real, int n_fake, int false_accepts, int false_rejects) {
  EvaluationResult r;
  r.n_real = n_real;
  r.n_fake = n_fake;
  r.false_accepts = false_accepts;
  r.false_rejects = false_rejects;
  r.far = n_fake > 0 ? 100.0 * false_accepts / n_fake : 0.0;
  r.frr = n_real > 0 ? 100.0 * false_rejects / n_real : 0.0;
  r.ace = compute_ace(r.far, r.frr);
  return r;
}

namespace {

void check_loo_input(std::span<const LabeledSample> samples) {
  int n[2] = {0, 0};
  for (const auto& s : samples) {
    if (s.sensor != samples.front().sensor) {
      throw Error(ErrorCode::MixedSensors, "samples from '" + samples.front().sensor + "' and '" + s.sensor + "'");
    }
    ++n[s.label == Label::Real ? 0 : 1];
  }
  if (n[0] < 3 || n[1] < 3) {
    throw Error(ErrorCode::DegenerateTraining, "leave-one-out needs at least 3 samples per class (real " +
                                                   std::to_string(n[0]) + ", fake " + std::to_string(n[1]) + ")");
  }
}

EvaluationResult score_decisions(std::span<const LabeledSample> samples, const std::vector<Label>& decisions) {
  int n_real = 0, n_fake = 0, fa = 0, fr = 0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (samples[i].label == Label::Real) {
      ++n_real;
      if (decisions[i] == Label::Fake) ++fr;
    } else {
      ++n_fake;
      if (decisions[i] == Label::Real) ++fa;
    }
  }
  return evaluation_from_counts(n_real, n_fake, fa, fr);
}

}  // namespace

LooStatistics::LooStatistics(std::span<const LabeledSample> samples) : samples_(samples) {
  check_loo_input(samples);
  x_.reserve(samples.size());
  for (int c = 0; c < 2; ++c) {
    mean_[c].setZero();
    scatter_[c].setZero();
  }
  for (const auto& s : samples) {
    Eigen::Matrix<double, kFeatureCount, 1> x;
    for (int i = 0; i < kFeatureCount; ++i) x[i] = s.features.values[i];
    x_.push_back(x);
    const int c = s.label == Label::Real ? 0 : 1;
    mean_[c] += x;
    ++n_[c];
  }
  for (int c = 0; c < 2; ++c) mean_[c] /= n_[c];
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const int c = samples[i].label == Label::Real ? 0 : 1;
    const auto v = x_[i] - mean_[c];
    scatter_[c] += v * v.transpose();
  }
}

Label LooStatistics::held_out_decision(std::size_t i, const SubsetMask& subset) const {
  const int c = samples_[i].label == Label::Real ? 0 : 1;
  const int other = 1 - c;
  const double nc = n_[c];
  const Eigen::Matrix<double, kFeatureCount, 1> v = x_[i] - mean_[c];

  // Remove sample i from its class: mean and scatter after a rank-one downdate.
  const Eigen::Matrix<double, kFeatureCount, 1> mean_c = mean_[c] - v / (nc - 1.0);
  const Eigen::Matrix<double, kFeatureCount, kFeatureCount> scatter =
      scatter_[c] - (nc / (nc - 1.0)) * (v * v.transpose()) + scatter_[other];
  const double total = n_[0] + n_[1] - 1.0;

  const auto idx = subset.indices();
  const Eigen::MatrixXd sigma = scatter(idx, idx) / (total - 2.0);
  const Eigen::VectorXd m_c = mean_c(idx);
  const Eigen::VectorXd m_o = mean_[other](idx);
  const double n_real_train = c == 0 ? nc - 1.0 : n_[0];

  const GaussianClassModel model =
      c == 0 ? GaussianClassModel::from_parameters(subset, m_c, m_o, sigma, n_real_train / total)
             : GaussianClassModel::from_parameters(subset, m_o, m_c, sigma, n_real_train / total);
  const Eigen::VectorXd x = x_[i](idx);
  return predict_projected(model, x).label;
}

EvaluationResult LooStatistics::evaluate(const SubsetMask& subset) const {
  std::vector<Label> decisions(samples_.size());
  for (std::size_t i = 0; i < samples_.size(); ++i) decisions[i] = held_out_decision(i, subset);
  return score_decisions(samples_, decisions);
}

std::vector<Label> loo_decisions(std::span<const LabeledSample> samples, const SubsetMask& subset) {
  const LooStatistics stats(samples);
  std::vector<Label> decisions(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) decisions[i] = stats.held_out_decision(i, subset);
  return decisions;
}

std::vector<Label> loo_decisions_naive(std::span<const LabeledSample> samples, const SubsetMask& subset) {
  check_loo_input(samples);
  std::vector<Label> decisions(samples.size());
  std::vector<LabeledSample> training;
  training.reserve(samples.size() - 1);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    training.clear();
    for (std::size_t j = 0; j < samples.size(); ++j)
      if (j != i) training.push_back(samples[j]);
    decisions[i] = predict(fit_lda(training, subset), samples[i].features).label;
  }
  return decisions;
}

EvaluationResult loo_evaluate(std::span<const LabeledSample> samples, const SubsetMask& subset) {
  return LooStatistics(samples).evaluate(subset);
}

EvaluationResult loo_evaluate_naive(std::span<const LabeledSample> samples, const SubsetMask& subset) {
  return score_decisions(samples, loo_decisions_naive(samples, subset));
}

}  // namespace liveprint
