#include "mediabar/repurpose.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "mediabar/error.hpp"

namespace mediabar {

void MatchConfig::validate() const {
  auto fail = [](const std::string& why) { throw Error(ErrorKind::Precondition, "MatchConfig: " + why); };
  if (window < 4) fail("window must be >= 4");
  if (!(threshold > 0.0 && threshold <= 1.0)) fail("threshold must be in (0, 1]");
  if (step_a < 1) fail("step_a must be >= 1");
  if (diagonal_slack < 0) fail("diagonal_slack must be >= 0");
  if (resolved_min_len() < 1) fail("min_len must be >= 1");
}

namespace {

struct Centered {
  std::vector<double> values;  // centered copy
  double norm = 0.0;
  bool constant = false;
};

Centered center(std::span<const double> x, std::size_t width) {
  Centered c;
  const std::size_t frames = x.size() / width;
  std::vector<double> mean(width, 0.0);
  double scale = 1.0;
  for (std::size_t i = 0; i < x.size(); ++i) mean[i % width] += x[i];
  for (double& m : mean) {
    m /= static_cast<double>(frames);
    scale = std::max(scale, std::abs(m));
  }
  c.values.resize(x.size());
  double sq = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    c.values[i] = x[i] - mean[i % width];
    sq += c.values[i] * c.values[i];
  }
  c.norm = std::sqrt(sq);
  // Rounding leaves a tiny residue on constant windows.
  c.constant = c.norm <= 1e-12 * std::sqrt(static_cast<double>(x.size())) * scale;
  return c;
}

bool raw_equal(std::span<const double> u, std::span<const double> v) {
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (std::abs(u[i] - v[i]) > 1e-9) return false;
  }
  return true;
}

double correlate(const Centered& cu, std::span<const double> u, const Centered& cv, std::span<const double> v) {
  if (cu.constant || cv.constant) return raw_equal(u, v) ? 1.0 : 0.0;
  double dot = 0.0;
  for (std::size_t i = 0; i < cu.values.size(); ++i) dot += cu.values[i] * cv.values[i];
  return std::clamp(dot / (cu.norm * cv.norm), -1.0, 1.0);
}

struct Hit {
  std::ptrdiff_t i;
  std::ptrdiff_t j;
  double score;
  std::ptrdiff_t diag() const { return j - i; }
};

struct DisjointSet {
  std::vector<std::size_t> parent;
  explicit DisjointSet(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

}  // namespace

double window_similarity(std::span<const double> u, std::span<const double> v, std::size_t width) {
  if (u.size() != v.size()) {
    throw Error(ErrorKind::Precondition, "window_similarity: length mismatch (" + std::to_string(u.size()) + " vs " +
                                             std::to_string(v.size()) + ")");
  }
  if (u.empty()) throw Error(ErrorKind::Precondition, "window_similarity: empty windows");
  if (width == 0 || u.size() % width != 0) {
    throw Error(ErrorKind::Precondition, "window_similarity: window length is not a multiple of the frame width");
  }
  return correlate(center(u, width), u, center(v, width), v);
}

std::vector<MatchSegment> find_matches(const Sequence& a, const Sequence& b, const MatchConfig& config,
                                       Modality modality) {
  config.validate();
  if (a.width == 0 || a.width != b.width) {
    throw Error(ErrorKind::Precondition, "find_matches: element widths differ for '" + a.id + "' and '" + b.id + "'");
  }
  const auto W = static_cast<std::size_t>(config.window);
  const std::size_t na = a.length();
  const std::size_t nb = b.length();
  if (na < W || nb < W) {
    throw Error(ErrorKind::Precondition, "find_matches: sequence '" + (na < W ? a.id : b.id) + "' has " +
                                             std::to_string(std::min(na, nb)) + " elements, shorter than window " +
                                             std::to_string(W));
  }
  const std::size_t span_len = W * a.width;
  auto window_of = [&](const Sequence& s, std::size_t start) {
    return std::span<const double>(s.data.data() + start * s.width, span_len);
  };

  std::vector<std::size_t> a_starts;
  for (std::size_t i = 0; i + W <= na; i += static_cast<std::size_t>(config.step_a)) a_starts.push_back(i);
  if (a_starts.back() != na - W) a_starts.push_back(na - W);

  std::vector<Centered> b_windows;
  b_windows.reserve(nb - W + 1);
  for (std::size_t j = 0; j + W <= nb; ++j) b_windows.push_back(center(window_of(b, j), b.width));

  std::vector<Hit> hits;
  for (std::size_t i : a_starts) {
    const auto u = window_of(a, i);
    const Centered cu = center(u, a.width);
    for (std::size_t j = 0; j < b_windows.size(); ++j) {
      const double s = correlate(cu, u, b_windows[j], window_of(b, j));
      if (s >= config.threshold) {
        hits.push_back({static_cast<std::ptrdiff_t>(i), static_cast<std::ptrdiff_t>(j), s});
      }
    }
  }

  // Chain hits: diagonals within the slack, spans touching or overlapping on both axes.
  const auto Wd = static_cast<std::ptrdiff_t>(W);
  const std::ptrdiff_t slack = config.diagonal_slack;
  std::map<std::ptrdiff_t, std::vector<std::size_t>> by_diag;
  for (std::size_t h = 0; h < hits.size(); ++h) by_diag[hits[h].diag()].push_back(h);  // ascending i per diagonal
  DisjointSet groups(hits.size());
  for (std::size_t h = 0; h < hits.size(); ++h) {
    const Hit& x = hits[h];
    for (auto it = by_diag.lower_bound(x.diag() - slack); it != by_diag.end() && it->first <= x.diag() + slack; ++it) {
      const auto& list = it->second;
      auto lo = std::lower_bound(list.begin(), list.end(), x.i - Wd,
                                 [&](std::size_t idx, std::ptrdiff_t v) { return hits[idx].i < v; });
      for (; lo != list.end() && hits[*lo].i <= x.i + Wd; ++lo) {
        const Hit& y = hits[*lo];
        if (std::abs(x.j - y.j) <= Wd) groups.unite(h, *lo);
      }
    }
  }

  std::map<std::size_t, std::vector<std::size_t>> members;
  for (std::size_t h = 0; h < hits.size(); ++h) members[groups.find(h)].push_back(h);

  std::vector<MatchSegment> out;
  const auto min_len = static_cast<std::ptrdiff_t>(config.resolved_min_len());
  for (const auto& [root, list] : members) {
    std::ptrdiff_t a_lo = hits[list.front()].i, a_hi = a_lo;
    double sum = 0.0;
    const Hit* best = nullptr;
    for (std::size_t idx : list) {
      const Hit& h = hits[idx];
      a_lo = std::min(a_lo, h.i);
      a_hi = std::max(a_hi, h.i);
      sum += h.score;
      if (!best || h.score > best->score ||
          (h.score == best->score && (std::abs(h.diag()) < std::abs(best->diag()) ||
                                      (std::abs(h.diag()) == std::abs(best->diag()) && h.diag() < best->diag())))) {
        best = &h;
      }
    }
    const std::ptrdiff_t d = best->diag();
    a_hi += Wd - 1;
    // Map the A extent onto B along the best diagonal, clipped to both sequences.
    a_lo = std::max(a_lo, -d);
    a_hi = std::min(a_hi, static_cast<std::ptrdiff_t>(nb) - 1 - d);
    if (a_hi - a_lo + 1 < min_len) continue;
    const double mean = sum / static_cast<double>(list.size());
    if (mean < config.threshold) continue;
    MatchSegment seg;
    seg.a_id = a.id;
    seg.b_id = b.id;
    seg.a_start = static_cast<std::size_t>(a_lo);
    seg.a_end = static_cast<std::size_t>(a_hi);
    seg.b_start = static_cast<std::size_t>(a_lo + d);
    seg.b_end = static_cast<std::size_t>(a_hi + d);
    seg.mean_score = mean;
    seg.modality = modality;
    out.push_back(std::move(seg));
  }
  std::sort(out.begin(), out.end(), [](const MatchSegment& x, const MatchSegment& y) {
    return std::tie(x.a_start, x.b_start) < std::tie(y.a_start, y.b_start);
  });
  return out;
}

RepurposeReport scan_corpus(std::span<const ModalitySignatures> modalities, const PairFilter& filter) {
  std::set<std::string> ids;
  for (const auto& m : modalities) {
    for (const auto& s : m.sequences) ids.insert(s.id);
  }
  if (ids.size() < 2) {
    throw Error(ErrorKind::Precondition, "scan_corpus: need at least 2 videos, got " + std::to_string(ids.size()));
  }

  RepurposeReport report;
  std::map<std::pair<std::string, std::string>, PairReport> pairs;
  for (const auto& m : modalities) {
    std::vector<std::size_t> order(m.sequences.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t x, std::size_t y) { return m.sequences[x].id < m.sequences[y].id; });
    auto config_for = [&](std::size_t idx) {
      return idx < m.per_sequence.size() && m.per_sequence[idx] ? *m.per_sequence[idx] : m.config;
    };
    for (std::size_t x = 0; x < order.size(); ++x) {
      for (std::size_t y = x + 1; y < order.size(); ++y) {
        const Sequence& sa = m.sequences[order[x]];
        const Sequence& sb = m.sequences[order[y]];
        if (filter && !filter(sa.id, sb.id, m.modality)) continue;
        MatchConfig cfg = config_for(order[x]);
        const MatchConfig other = config_for(order[y]);
        if (other.window > cfg.window) cfg = other;
        try {
          auto segs = find_matches(sa, sb, cfg, m.modality);
          if (segs.empty()) continue;
          PairReport& pr = pairs[{sa.id, sb.id}];
          pr.a = sa.id;
          pr.b = sb.id;
          pr.segments.insert(pr.segments.end(), segs.begin(), segs.end());
        } catch (const Error& e) {
          report.skipped.push_back(sa.id + "/" + sb.id + " " + to_string(m.modality) + ": " + e.what());
        }
      }
    }
  }
  for (auto& [key, pr] : pairs) {
    bool has_barcode = false, has_audio = false;
    for (const auto& s : pr.segments) {
      has_barcode = has_barcode || s.modality == Modality::Barcode;
      has_audio = has_audio || s.modality == Modality::Audio;
    }
    pr.multi_modal = has_barcode && has_audio;
    std::stable_sort(pr.segments.begin(), pr.segments.end(), [](const MatchSegment& x, const MatchSegment& y) {
      return std::tie(x.modality, x.a_start, x.b_start) < std::tie(y.modality, y.a_start, y.b_start);
    });
    report.pairs.push_back(std::move(pr));
  }
  return report;
}

}  // namespace mediabar
