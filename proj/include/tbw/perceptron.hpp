#pragma once

// Shared machinery for the averaged perceptron learners: a string feature
// dictionary and a dense weight table with lazy averaging.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace tbw {

using FeatureId = std::uint32_t;

class FeatureIndex {
 public:
  std::optional<FeatureId> find(std::string_view name) const;
  FeatureId intern(const std::string& name);

  std::size_t size() const { return names_.size(); }
  const std::string& name(FeatureId id) const { return names_[id]; }

  friend bool operator==(const FeatureIndex& a, const FeatureIndex& b) { return a.names_ == b.names_; }

 private:
  struct Hash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const noexcept { return std::hash<std::string_view>{}(s); }
  };
  std::unordered_map<std::string, FeatureId, Hash, std::equal_to<>> ids_;
  std::vector<std::string> names_;
};

// Weights for (feature, class) pairs stored densely as feature * width +
// class. The averaged value is the mean of the weight vector after each
// instance, i.e. (1/S) * sum over steps s = 1..S of w_s, maintained lazily.
// Updates may optionally be logged so the average can be recomputed from
// scratch as initial + (1/S) * sum(delta * (S - step + 1)).
class AveragedWeights {
 public:
  explicit AveragedWeights(std::size_t width = 1, bool keep_log = false) : width_(width), keep_log_(keep_log) {}

  // Starts from `initial` (size must be a multiple of width).
  void initialize(std::vector<double> initial);
  void ensure_features(std::size_t features);

  std::size_t width() const { return width_; }
  std::size_t features() const { return width_ == 0 ? 0 : w_.size() / width_; }
  std::uint64_t steps() const { return step_; }

  double weight(FeatureId f, std::size_t cls) const { return w_[f * width_ + cls]; }
  const double* row(FeatureId f) const { return w_.data() + f * width_; }

  // Begins the next training instance.
  void tick() { ++step_; }
  void update(FeatureId f, std::size_t cls, double delta);

  std::vector<double> averaged() const;
  std::vector<double> averaged_from_log() const;

 private:
  struct LogEntry {
    std::uint64_t step;
    std::size_t slot;
    double delta;
  };

  std::size_t width_;
  bool keep_log_;
  std::uint64_t step_ = 0;
  std::vector<double> w_;
  std::vector<double> acc_;
  std::vector<std::uint64_t> last_;
  std::vector<double> initial_;
  std::vector<LogEntry> log_;
};

}  // namespace tbw
