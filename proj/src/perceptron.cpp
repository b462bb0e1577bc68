#include "tbw/perceptron.hpp"

#include "tbw/error.hpp"

namespace tbw {

std::optional<FeatureId> FeatureIndex::find(std::string_view name) const {
  const auto it = ids_.find(name);
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

FeatureId FeatureIndex::intern(const std::string& name) {
  const auto [it, inserted] = ids_.try_emplace(name, static_cast<FeatureId>(names_.size()));
  if (inserted) names_.push_back(name);
  return it->second;
}

void AveragedWeights::initialize(std::vector<double> initial) {
  if (width_ == 0 || initial.size() % width_ != 0) {
    throw Error(ErrorCode::InvalidArgument, "initial weights do not match the table width");
  }
  w_ = std::move(initial);
  initial_ = w_;
  acc_.assign(w_.size(), 0.0);
  last_.assign(w_.size(), 0);
  step_ = 0;
  log_.clear();
}

void AveragedWeights::ensure_features(std::size_t features) {
  const auto slots = features * width_;
  if (slots <= w_.size()) return;
  w_.resize(slots, 0.0);
  acc_.resize(slots, 0.0);
  last_.resize(slots, 0);
  initial_.resize(slots, 0.0);
}

void AveragedWeights::update(FeatureId f, std::size_t cls, double delta) {
  const auto slot = static_cast<std::size_t>(f) * width_ + cls;
  // The current step's prediction used the old value; fold the finished
  // steps in before changing it.
  const auto done = step_ == 0 ? 0 : step_ - 1;
  acc_[slot] += w_[slot] * static_cast<double>(done - last_[slot]);
  last_[slot] = done;
  w_[slot] += delta;
  if (keep_log_) log_.push_back({step_, slot, delta});
}

std::vector<double> AveragedWeights::averaged() const {
  if (step_ == 0) return w_;
  std::vector<double> avg(w_.size());
  const auto total = static_cast<double>(step_);
  for (std::size_t i = 0; i < w_.size(); ++i) {
    avg[i] = (acc_[i] + w_[i] * static_cast<double>(step_ - last_[i])) / total;
  }
  return avg;
}

std::vector<double> AveragedWeights::averaged_from_log() const {
  if (!keep_log_) throw Error(ErrorCode::InvalidArgument, "update log was not recorded");
  std::vector<double> avg = initial_;
  avg.resize(w_.size(), 0.0);
  if (step_ == 0) return w_;
  const auto total = static_cast<double>(step_);
  std::vector<double> sum(w_.size(), 0.0);
  for (const auto& e : log_) sum[e.slot] += e.delta * static_cast<double>(step_ - e.step + 1);
  for (std::size_t i = 0; i < avg.size(); ++i) avg[i] += sum[i] / total;
  return avg;
}

}  // namespace tbw
