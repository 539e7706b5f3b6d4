#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "corebench/errors.hpp"

namespace corebench {

enum class AdKind { Text, Image };

inline constexpr std::size_t kPadding = std::numeric_limits<std::size_t>::max();

/// A Text-and-Image instance: `k` slots, text ads demanding one slot each and
/// image ads demanding all of them.
///
/// Agents are identified by a flat id: text ads are `0 .. text_count()-1` in
/// input order, image ads follow as `text_count() .. agent_count()-1`.
///
/// The canonical view sorts each class by (value desc, id asc) and pads with
/// zero-valued ads so that at least k+1 texts and 2 images exist. Padding ads
/// have no agent id (`kPadding` in the rank tables).
class TextImageProfile {
 public:
  TextImageProfile() = default;

  static TextImageProfile create(std::size_t k, std::vector<double> text,
                                 std::vector<double> image) {
    if (k == 0) throw InvalidInput("k: must be at least 1");
    if (text.empty() && image.empty())
      throw InvalidInput("text/image: profile has no ads");
    check_values("text", text);
    check_values("image", image);

    TextImageProfile p;
    p.k_ = k;
    p.text_ = std::move(text);
    p.image_ = std::move(image);
    canonicalize(p.text_, k + 1, p.sorted_text_, p.text_rank_);
    canonicalize(p.image_, 2, p.sorted_image_, p.image_rank_);
    return p;
  }

  std::size_t slots() const noexcept { return k_; }
  std::size_t text_count() const noexcept { return text_.size(); }
  std::size_t image_count() const noexcept { return image_.size(); }
  std::size_t agent_count() const noexcept { return text_.size() + image_.size(); }

  std::span<const double> text_values() const noexcept { return text_; }
  std::span<const double> image_values() const noexcept { return image_; }

  AdKind kind_of(std::size_t agent) const {
    check_agent(agent);
    return agent < text_.size() ? AdKind::Text : AdKind::Image;
  }

  double value_of(std::size_t agent) const {
    check_agent(agent);
    return agent < text_.size() ? text_[agent] : image_[agent - text_.size()];
  }

  /// Copy of this profile with one agent's report replaced.
  TextImageProfile with_value(std::size_t agent, double value) const {
    check_agent(agent);
    std::vector<double> text = text_;
    std::vector<double> image = image_;
    if (agent < text.size())
      text[agent] = value;
    else
      image[agent - text.size()] = value;
    return create(k_, std::move(text), std::move(image));
  }

  // Canonical (sorted, padded) views. Rank r is 1-based: text(1) is the highest.
  double text(std::size_t rank) const { return sorted_text_.at(rank - 1); }
  double image(std::size_t rank) const { return sorted_image_.at(rank - 1); }
  std::span<const double> sorted_text() const noexcept { return sorted_text_; }
  std::span<const double> sorted_image() const noexcept { return sorted_image_; }

  /// Agent id of the text ad at `rank`, or kPadding.
  std::size_t text_agent(std::size_t rank) const { return text_rank_.at(rank - 1); }
  /// Agent id of the image ad at `rank`, or kPadding.
  std::size_t image_agent(std::size_t rank) const {
    const std::size_t local = image_rank_.at(rank - 1);
    return local == kPadding ? kPadding : local + text_.size();
  }

  double top_k_text_sum() const noexcept {
    return std::accumulate(sorted_text_.begin(), sorted_text_.begin() + k_, 0.0);
  }

 private:
  static void check_values(const char* field, const std::vector<double>& values) {
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (!std::isfinite(values[i]) || values[i] < 0.0)
        throw InvalidInput(std::string(field) + "[" + std::to_string(i) +
                           "]: value must be finite and non-negative");
    }
  }

  void check_agent(std::size_t agent) const {
    if (agent >= agent_count())
      throw InvalidInput("agent " + std::to_string(agent) + " out of range");
  }

  static void canonicalize(const std::vector<double>& values, std::size_t min_size,
                           std::vector<double>& sorted, std::vector<std::size_t>& rank) {
    rank.resize(values.size());
    std::iota(rank.begin(), rank.end(), std::size_t{0});
    if (!std::is_sorted(values.begin(), values.end(), std::greater<>{})) {
      std::stable_sort(rank.begin(), rank.end(),
                       [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
    }
    sorted.resize(values.size());
    for (std::size_t r = 0; r < rank.size(); ++r) sorted[r] = values[rank[r]];
    if (sorted.size() < min_size) {
      sorted.resize(min_size, 0.0);
      rank.resize(min_size, kPadding);
    }
  }

  std::size_t k_ = 1;
  std::vector<double> text_;
  std::vector<double> image_;
  std::vector<double> sorted_text_;
  std::vector<double> sorted_image_;
  std::vector<std::size_t> text_rank_;
  std::vector<std::size_t> image_rank_;
};

}  // namespace corebench
