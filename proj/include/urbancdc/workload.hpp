#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "urbancdc/common.hpp"
#include "urbancdc/population.hpp"
#include "urbancdc/random.hpp"

namespace urbancdc {

/// Contents with a category label each. Labels are reporting metadata only.
class ContentCatalog {
 public:
  explicit ContentCatalog(std::size_t size,
                          std::vector<std::string> categories = {"Sports", "Education",
                                                                 "Politics", "Movies"});

  std::size_t size() const noexcept { return size_; }
  std::span<const std::string> categories() const noexcept { return categories_; }
  std::string_view category_of(ContentId f) const;

 private:
  std::size_t size_ = 0;
  std::vector<std::string> categories_;
};

/// Zipf probabilities for ranks 1..M (index 0 is rank 1).
std::vector<double> zipf_pmf(double s, std::size_t catalog_size);

struct SkewRange {
  double min = 0.0;
  double max = 2.0;

  friend bool operator==(const SkewRange&, const SkewRange&) = default;
};

/// One community's taste: a skew and a ranking of the catalog.
struct CommunityInterest {
  double s = 0.0;
  std::vector<std::uint32_t> rank_of;  // content id -> 0-based popularity rank

  friend bool operator==(const CommunityInterest&, const CommunityInterest&) = default;
};

/// New skew drawn uniformly from `range` and a uniformly random ranking.
CommunityInterest random_interest(std::size_t catalog_size, const SkewRange& range, Rng& rng);

struct Request {
  NodeId origin = 0;
  ContentId content = 0;
  std::uint64_t sequence_no = 0;

  friend bool operator==(const Request&, const Request&) = default;
};

/// Request generator: origin node drawn by r, content drawn from the origin
/// community's Zipf law through that community's ranking.
class WorkloadModel {
 public:
  WorkloadModel(const RequestVector& r, std::vector<std::uint32_t> community_of_node,
                std::vector<CommunityInterest> interests, std::size_t catalog_size);

  Request sample(Rng& rng);

  /// Every community gets a fresh skew and ranking.
  void shuffle_epoch(Rng& rng, const SkewRange& range);

  std::span<const CommunityInterest> interests() const noexcept { return interests_; }
  std::uint32_t community_of(NodeId node) const { return community_of_node_.at(node); }
  std::size_t catalog_size() const noexcept { return catalog_size_; }
  std::uint64_t issued() const noexcept { return next_sequence_; }

 private:
  void rebuild(std::size_t community);

  std::vector<double> origin_cdf_;
  std::vector<std::uint32_t> community_of_node_;
  std::vector<CommunityInterest> interests_;
  std::vector<std::vector<double>> rank_cdf_;
  std::vector<std::vector<ContentId>> content_at_rank_;
  std::size_t catalog_size_ = 0;
  std::uint64_t next_sequence_ = 0;
};

/// Maximum-likelihood Zipf exponent. Observed contents are ranked by
/// descending frequency (ties: smaller id ranks first) and the
/// log-likelihood is maximised by golden-section search on [lo, hi].
double mle_estimate_s(std::span<const ContentId> observations, std::size_t catalog_size,
                      double lo = 0.0, double hi = 4.0, double tolerance = 1e-4);

/// `sequence_no,origin_node,content_id`
void write_trace(std::ostream& out, std::span<const Request> requests);
std::vector<Request> read_trace(std::istream& in);
std::vector<Request> load_trace(const std::filesystem::path& path);

}  // namespace urbancdc
