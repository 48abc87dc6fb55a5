#include "urbancdc/workload.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>

#include "text_util.hpp"

namespace urbancdc {

ContentCatalog::ContentCatalog(std::size_t size, std::vector<std::string> categories)
    : size_(size), categories_(std::move(categories)) {
  if (size_ == 0) throw ValidationError("catalog needs at least one content");
  if (categories_.empty()) throw ValidationError("catalog needs at least one category");
}

std::string_view ContentCatalog::category_of(ContentId f) const {
  if (f >= size_) throw std::out_of_range("content id outside the catalog");
  return categories_[f % categories_.size()];
}

std::vector<double> zipf_pmf(double s, std::size_t catalog_size) {
  if (catalog_size == 0) throw ValidationError("catalog size must be at least 1");
  if (!(s >= 0.0)) throw ValidationError("Zipf exponent must be >= 0");
  std::vector<double> pmf(catalog_size);
  double total = 0.0;
  for (std::size_t tau = 1; tau <= catalog_size; ++tau) {
    pmf[tau - 1] = std::pow(static_cast<double>(tau), -s);
    total += pmf[tau - 1];
  }
  for (auto& p : pmf) p /= total;
  return pmf;
}

CommunityInterest random_interest(std::size_t catalog_size, const SkewRange& range, Rng& rng) {
  CommunityInterest interest;
  interest.s = range.min == range.max ? range.min : rng.uniform(range.min, range.max);
  interest.rank_of.resize(catalog_size);
  std::iota(interest.rank_of.begin(), interest.rank_of.end(), 0U);
  rng.shuffle(std::span<std::uint32_t>(interest.rank_of));
  return interest;
}

namespace {

std::vector<double> cumulative(std::span<const double> weights) {
  std::vector<double> cdf(weights.size());
  double total = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    total += weights[i];
    cdf[i] = total;
  }
  for (auto& c : cdf) c /= total;
  // Entries after the last positive weight are pinned to exactly 1.
  for (std::size_t i = weights.size(); i-- > 0;) {
    cdf[i] = 1.0;
    if (weights[i] > 0.0) break;
  }
  return cdf;
}

std::size_t draw(std::span<const double> cdf, Rng& rng) {
  const double u = rng.uniform();
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  return static_cast<std::size_t>(it - cdf.begin());
}

}  // namespace

WorkloadModel::WorkloadModel(const RequestVector& r, std::vector<std::uint32_t> community_of_node,
                             std::vector<CommunityInterest> interests, std::size_t catalog_size)
    : community_of_node_(std::move(community_of_node)),
      interests_(std::move(interests)),
      catalog_size_(catalog_size) {
  if (catalog_size_ == 0) throw ValidationError("catalog size must be at least 1");
  if (r.size() == 0 || r.size() != community_of_node_.size()) {
    throw ValidationError("request vector and community map must cover the same nodes");
  }
  for (auto c : community_of_node_) {
    if (c >= interests_.size()) throw ValidationError("node mapped to a community without interests");
  }
  origin_cdf_ = cumulative(r.values());
  rank_cdf_.resize(interests_.size());
  content_at_rank_.resize(interests_.size());
  for (std::size_t c = 0; c < interests_.size(); ++c) rebuild(c);
}

void WorkloadModel::rebuild(std::size_t community) {
  const auto& interest = interests_[community];
  if (interest.rank_of.size() != catalog_size_) {
    throw ValidationError("community ranking must cover the whole catalog");
  }
  auto& at_rank = content_at_rank_[community];
  at_rank.assign(catalog_size_, 0);
  std::vector<char> used(catalog_size_, 0);
  for (ContentId f = 0; f < catalog_size_; ++f) {
    const auto rank = interest.rank_of[f];
    if (rank >= catalog_size_ || used[rank]) {
      throw ValidationError("community ranking is not a permutation");
    }
    used[rank] = 1;
    at_rank[rank] = f;
  }
  rank_cdf_[community] = cumulative(zipf_pmf(interest.s, catalog_size_));
}

Request WorkloadModel::sample(Rng& rng) {
  const auto origin = static_cast<NodeId>(draw(origin_cdf_, rng));
  const auto community = community_of_node_[origin];
  const auto rank = draw(rank_cdf_[community], rng);
  return {origin, content_at_rank_[community][rank], next_sequence_++};
}

void WorkloadModel::shuffle_epoch(Rng& rng, const SkewRange& range) {
  for (std::size_t c = 0; c < interests_.size(); ++c) {
    interests_[c] = random_interest(catalog_size_, range, rng);
    rebuild(c);
  }
}

double mle_estimate_s(std::span<const ContentId> observations, std::size_t catalog_size, double lo,
                      double hi, double tolerance) {
  if (observations.empty()) throw ValidationError("MLE needs at least one observation");
  if (catalog_size == 0) throw ValidationError("catalog size must be at least 1");
  if (!(lo <= hi)) throw ValidationError("MLE search bracket is empty");

  std::vector<std::uint64_t> counts(catalog_size, 0);
  for (auto f : observations) {
    if (f >= catalog_size) throw ValidationError("observation outside the catalog");
    ++counts[f];
  }
  std::vector<ContentId> order;
  for (ContentId f = 0; f < catalog_size; ++f) {
    if (counts[f] > 0) order.push_back(f);
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](ContentId a, ContentId b) { return counts[a] > counts[b]; });

  // log L(s) = -s * sum log(rank) - n * log H(M, s)
  double sum_log_rank = 0.0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    sum_log_rank += static_cast<double>(counts[order[i]]) * std::log(static_cast<double>(i + 1));
  }
  std::vector<double> log_m(catalog_size);
  for (std::size_t m = 0; m < catalog_size; ++m) log_m[m] = std::log(static_cast<double>(m + 1));
  const auto n = static_cast<double>(observations.size());
  const auto log_likelihood = [&](double s) {
    double h = 0.0;
    for (double lm : log_m) h += std::exp(-s * lm);
    return -s * sum_log_rank - n * std::log(h);
  };

  // The log-likelihood is concave in s.
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo;
  double b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = log_likelihood(c);
  double fd = log_likelihood(d);
  while (b - a > tolerance) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = log_likelihood(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = log_likelihood(d);
    }
  }
  double best = 0.5 * (a + b);
  double best_value = log_likelihood(best);
  for (double edge : {lo, hi}) {
    const double value = log_likelihood(edge);
    if (value > best_value) {
      best = edge;
      best_value = value;
    }
  }
  return best;
}

void write_trace(std::ostream& out, std::span<const Request> requests) {
  out << "sequence_no,origin_node,content_id\n";
  for (const auto& r : requests) out << r.sequence_no << ',' << r.origin << ',' << r.content << '\n';
}

std::vector<Request> read_trace(std::istream& in) {
  std::vector<Request> out;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    const auto content = text::trim(line);
    if (content.empty()) continue;
    const auto fields = text::split(content, ',');
    if (!have_header) {
      if (fields.size() != 3 || fields[0] != "sequence_no" || fields[1] != "origin_node" ||
          fields[2] != "content_id") {
        throw ParseError("expected header sequence_no,origin_node,content_id", line_no);
      }
      have_header = true;
      continue;
    }
    if (fields.size() != 3) throw ParseError("expected 3 fields", line_no);
    const auto seq = text::parse_number<std::uint64_t>(fields[0]);
    const auto origin = text::parse_number<NodeId>(fields[1]);
    const auto f = text::parse_number<ContentId>(fields[2]);
    if (!seq || !origin || !f) throw ParseError("malformed trace record", line_no);
    out.push_back({*origin, *f, *seq});
  }
  return out;
}

std::vector<Request> load_trace(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open trace file " + path.string());
  return read_trace(in);
}

}  // namespace urbancdc
