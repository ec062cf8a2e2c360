#include "streetforge/diffusion/tiny_denoiser.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "streetforge/io/blob_io.hpp"
#include "streetforge/rng.hpp"

namespace streetforge {

TinyDenoiser::TinyDenoiser(int x_channels, int cond_channels, int hidden,
                           const NoiseSchedule& sched, uint64_t init_seed)
    : x_channels_(x_channels),
      cond_channels_(cond_channels),
      hidden_(hidden),
      sched_(sched) {
  require(x_channels >= 1 && cond_channels >= 1 && hidden >= 1,
          "tiny denoiser dims must be positive");
  const int in = feature_dim();
  w1_.resize(hidden_, in);
  w2_.resize(hidden_, hidden_);
  w3_.resize(x_channels_, hidden_);
  b1_ = Eigen::VectorXd::Zero(hidden_);
  b2_ = Eigen::VectorXd::Zero(hidden_);
  b3_ = Eigen::VectorXd::Zero(x_channels_);

  // He-style init scaled for tanh.
  Rng rng(init_seed);
  auto fill = [&rng](Eigen::MatrixXd& m, double scale) {
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = scale * rng.normal();
  };
  fill(w1_, 1.0 / std::sqrt(static_cast<double>(in)));
  fill(w2_, 1.0 / std::sqrt(static_cast<double>(hidden_)));
  fill(w3_, 1.0 / std::sqrt(static_cast<double>(hidden_)));
}

std::array<int, 3> TinyDenoiser::latent_shape(const ConditionStack& cond) const {
  cond.validate();
  return {cond.ref_latent.h, cond.ref_latent.w, x_channels_};
}

Eigen::MatrixXd TinyDenoiser::features(const LatentTensor& x_t, int t,
                                       const ConditionStack& cond) const {
  cond.validate();
  require(x_t.c == x_channels_, "x_t channel count mismatch");
  require(x_t.h == cond.ref_latent.h && x_t.w == cond.ref_latent.w,
          "condition stack spatial shape must match x_t");
  require(cond.ref_latent.c == cond_channels_, "condition channel count mismatch");

  const size_t locations = static_cast<size_t>(x_t.h) * x_t.w;
  const int n = cond.entries();

  Eigen::MatrixXd f(locations, feature_dim());
  const double a = sched_.alpha(t);
  const double s = sched_.sigma(t);
  const auto one_hot = task_one_hot(cond.task);

  for (size_t p = 0; p < locations; ++p) {
    int col = 0;
    for (int c = 0; c < x_channels_; ++c)
      f(p, col++) = x_t.values[p * x_channels_ + c];
    for (int c = 0; c < cond_channels_; ++c)
      f(p, col++) = cond.ref_latent.values[p * cond_channels_ + c];
    for (int c = 0; c < cond_channels_; ++c) {
      double acc = 0.0;
      for (int i = 1; i < n; ++i)
        acc += cond.color_latents[i].values[p * cond_channels_ + c];
      f(p, col++) = n > 1 ? acc / (n - 1) : 0.0;
    }
    for (int c = 0; c < cond_channels_; ++c) {
      double acc = 0.0;
      for (int i = 0; i < n; ++i)
        acc += cond.depth_latents[i].values[p * cond_channels_ + c];
      f(p, col++) = acc / n;
    }
    f(p, col++) = a;
    f(p, col++) = s;
    f(p, col++) = one_hot[0];
    f(p, col++) = one_hot[1];
    f(p, col++) = one_hot[2];
  }
  return f;
}

LatentTensor TinyDenoiser::predict_v(const LatentTensor& x_t, int t,
                                     const ConditionStack& cond) const {
  Eigen::MatrixXd f = features(x_t, t, cond);
  Eigen::MatrixXd h1 =
      ((f * w1_.transpose()).rowwise() + b1_.transpose()).array().tanh();
  Eigen::MatrixXd h2 =
      ((h1 * w2_.transpose()).rowwise() + b2_.transpose()).array().tanh();
  Eigen::MatrixXd out = (h2 * w3_.transpose()).rowwise() + b3_.transpose();

  LatentTensor v(x_t.h, x_t.w, x_channels_);
  for (Eigen::Index p = 0; p < out.rows(); ++p)
    for (int c = 0; c < x_channels_; ++c)
      v.values[static_cast<size_t>(p) * x_channels_ + c] = out(p, c);
  return v;
}

double TinyDenoiser::loss_and_gradient(const LatentTensor& x_t, int t,
                                       const ConditionStack& cond,
                                       const LatentTensor& target,
                                       Eigen::VectorXd& grad) const {
  require(target.same_shape(x_t), "target shape mismatch");
  Eigen::MatrixXd f = features(x_t, t, cond);
  Eigen::MatrixXd h1 =
      ((f * w1_.transpose()).rowwise() + b1_.transpose()).array().tanh();
  Eigen::MatrixXd h2 =
      ((h1 * w2_.transpose()).rowwise() + b2_.transpose()).array().tanh();
  Eigen::MatrixXd out = (h2 * w3_.transpose()).rowwise() + b3_.transpose();

  const Eigen::Index rows = out.rows();
  Eigen::MatrixXd tgt(rows, x_channels_);
  for (Eigen::Index p = 0; p < rows; ++p)
    for (int c = 0; c < x_channels_; ++c)
      tgt(p, c) = target.values[static_cast<size_t>(p) * x_channels_ + c];

  Eigen::MatrixXd diff = out - tgt;
  const double n = static_cast<double>(diff.size());
  double loss = diff.squaredNorm() / n;

  // Mean-squared loss; d_out = 2*diff/n.
  Eigen::MatrixXd d_out = (2.0 / n) * diff;
  Eigen::MatrixXd d_w3 = d_out.transpose() * h2;
  Eigen::VectorXd d_b3 = d_out.colwise().sum();
  Eigen::MatrixXd d_h2 = d_out * w3_;
  Eigen::MatrixXd d_z2 = d_h2.cwiseProduct((1.0 - h2.array().square()).matrix());
  Eigen::MatrixXd d_w2 = d_z2.transpose() * h1;
  Eigen::VectorXd d_b2 = d_z2.colwise().sum();
  Eigen::MatrixXd d_h1 = d_z2 * w2_;
  Eigen::MatrixXd d_z1 = d_h1.cwiseProduct((1.0 - h1.array().square()).matrix());
  Eigen::MatrixXd d_w1 = d_z1.transpose() * f;
  Eigen::VectorXd d_b1 = d_z1.colwise().sum();

  grad.resize(param_count());
  Eigen::Index off = 0;
  auto put_mat = [&](const Eigen::MatrixXd& m) {
    grad.segment(off, m.size()) = Eigen::Map<const Eigen::VectorXd>(m.data(), m.size());
    off += m.size();
  };
  auto put_vec = [&](const Eigen::VectorXd& v) {
    grad.segment(off, v.size()) = v;
    off += v.size();
  };
  put_mat(d_w1);
  put_mat(d_w2);
  put_mat(d_w3);
  put_vec(d_b1);
  put_vec(d_b2);
  put_vec(d_b3);
  return loss;
}

Eigen::Index TinyDenoiser::param_count() const {
  return w1_.size() + w2_.size() + w3_.size() + b1_.size() + b2_.size() + b3_.size();
}

Eigen::VectorXd TinyDenoiser::parameters() const {
  Eigen::VectorXd flat(param_count());
  Eigen::Index off = 0;
  auto put = [&](const double* data, Eigen::Index n) {
    flat.segment(off, n) = Eigen::Map<const Eigen::VectorXd>(data, n);
    off += n;
  };
  put(w1_.data(), w1_.size());
  put(w2_.data(), w2_.size());
  put(w3_.data(), w3_.size());
  put(b1_.data(), b1_.size());
  put(b2_.data(), b2_.size());
  put(b3_.data(), b3_.size());
  return flat;
}

void TinyDenoiser::set_parameters(const Eigen::VectorXd& flat) {
  require(flat.size() == param_count(), "parameter vector size mismatch");
  Eigen::Index off = 0;
  auto take = [&](double* data, Eigen::Index n) {
    Eigen::Map<Eigen::VectorXd>(data, n) = flat.segment(off, n);
    off += n;
  };
  take(w1_.data(), w1_.size());
  take(w2_.data(), w2_.size());
  take(w3_.data(), w3_.size());
  take(b1_.data(), b1_.size());
  take(b2_.data(), b2_.size());
  take(b3_.data(), b3_.size());
}

void TinyDenoiser::save(const std::string& path, const std::string& objective) const {
  nlohmann::json header;
  header["kind"] = "tiny_denoiser";
  header["x_channels"] = x_channels_;
  header["cond_channels"] = cond_channels_;
  header["hidden"] = hidden_;
  header["objective"] = objective;
  header["schedule_digest"] = schedule_digest(sched_);
  header["layer_sizes"] = {
      {"w1", {w1_.rows(), w1_.cols()}}, {"w2", {w2_.rows(), w2_.cols()}},
      {"w3", {w3_.rows(), w3_.cols()}}, {"b1", b1_.size()},
      {"b2", b2_.size()},               {"b3", b3_.size()}};

  Eigen::VectorXd flat = parameters();
  std::vector<float> blob(flat.size());
  for (Eigen::Index i = 0; i < flat.size(); ++i)
    blob[static_cast<size_t>(i)] = static_cast<float>(flat[i]);
  write_blob_file(path, header, blob);
}

TinyDenoiser TinyDenoiser::load(const std::string& path, const NoiseSchedule& sched) {
  nlohmann::json header;
  std::vector<float> blob = read_blob_file(path, header);
  require(header.value("kind", "") == "tiny_denoiser", "not a tiny_denoiser file");
  require(header.value("schedule_digest", "") == schedule_digest(sched),
          "weights were trained against a different noise schedule");

  TinyDenoiser model(header.at("x_channels").get<int>(),
                     header.at("cond_channels").get<int>(),
                     header.at("hidden").get<int>(), sched);
  require(static_cast<Eigen::Index>(blob.size()) == model.param_count(),
          "weight blob size mismatch");
  Eigen::VectorXd flat(model.param_count());
  for (Eigen::Index i = 0; i < flat.size(); ++i)
    flat[i] = blob[static_cast<size_t>(i)];
  model.set_parameters(flat);
  return model;
}

}  // namespace streetforge
