#pragma once

#include <algorithm>
#include <compare>
#include <string>
#include <vector>

namespace ntw {

struct Feature {
  std::string attribute;
  std::string value;
  auto operator<=>(const Feature&) const = default;
};

// A sorted, duplicate-free set of (attribute, value) pairs. A node's feature
// set holds at most one value per attribute; rule feature sets obey the same
// shape because they arise from intersections.
class FeatureSet {
 public:
  FeatureSet() = default;
  explicit FeatureSet(std::vector<Feature> features) : features_(std::move(features)) { normalize(); }
  FeatureSet(std::initializer_list<Feature> features) : features_(features) { normalize(); }

  const std::vector<Feature>& items() const { return features_; }
  bool empty() const { return features_.empty(); }
  size_t size() const { return features_.size(); }

  void insert(std::string attribute, std::string value) {
    Feature f{std::move(attribute), std::move(value)};
    auto it = std::lower_bound(features_.begin(), features_.end(), f);
    if (it == features_.end() || *it != f) features_.insert(it, std::move(f));
  }

  bool contains(const Feature& f) const {
    return std::binary_search(features_.begin(), features_.end(), f);
  }

  const std::string* value_of(const std::string& attribute) const {
    auto it = std::lower_bound(features_.begin(), features_.end(), Feature{attribute, ""});
    if (it != features_.end() && it->attribute == attribute) return &it->value;
    return nullptr;
  }

  bool is_superset_of(const FeatureSet& other) const {
    return std::includes(features_.begin(), features_.end(), other.features_.begin(),
                         other.features_.end());
  }

  FeatureSet intersect(const FeatureSet& other) const {
    FeatureSet out;
    std::set_intersection(features_.begin(), features_.end(), other.features_.begin(),
                          other.features_.end(), std::back_inserter(out.features_));
    return out;
  }

  auto operator<=>(const FeatureSet&) const = default;

 private:
  void normalize() {
    std::sort(features_.begin(), features_.end());
    features_.erase(std::unique(features_.begin(), features_.end()), features_.end());
  }

  std::vector<Feature> features_;
};

}  // namespace ntw
