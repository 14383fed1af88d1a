#include "rig/genmodel.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <sstream>

#include "rig/error.hpp"

namespace rig {

namespace {

constexpr double kNaivePairCap = 1e8;

struct Bucket {
  double y_max = 0.0;
  std::vector<VertexId> ids;
};

// Vertices with positive weight grouped by floor(log2 Y), ids ascending.
std::vector<Bucket> bucket_vertices(std::span<const double> y) {
  std::map<int, Bucket> by_exponent;
  for (VertexId j = 0; j < y.size(); ++j) {
    if (!(y[j] > 0.0)) continue;
    auto& bucket = by_exponent[std::ilogb(y[j])];
    bucket.ids.push_back(j);
    bucket.y_max = std::max(bucket.y_max, y[j]);
  }
  std::vector<Bucket> out;
  out.reserve(by_exponent.size());
  for (auto& [exponent, bucket] : by_exponent) out.push_back(std::move(bucket));
  return out;
}

}  // namespace

void ModelParams::validate() const {
  if (n < 2) throw Error(ErrorCode::InvalidSpec, "model needs n >= 2 vertices");
  if (m < 1) throw Error(ErrorCode::InvalidSpec, "model needs m >= 1 attributes");
}

std::size_t BipartiteIncidence::link_count() const {
  std::size_t total = 0;
  for (const auto& list : members) total += list.size();
  return total;
}

std::vector<std::uint32_t> IntersectionView::degrees() const {
  std::vector<std::uint32_t> d(n);
  for (VertexId v = 0; v < n; ++v) d[v] = degree(v);
  return d;
}

bool IntersectionView::adjacent(VertexId u, VertexId v) const {
  const auto nb = neighbors_of(u);
  return std::binary_search(nb.begin(), nb.end(), v);
}

IntersectionView IntersectionView::from_edges(std::uint32_t n, std::span<const std::pair<VertexId, VertexId>> edges) {
  std::vector<std::vector<VertexId>> adj(n);
  for (const auto& [u, v] : edges) {
    if (u == v) continue;
    if (u >= n || v >= n) throw Error(ErrorCode::InvalidSpec, "edge endpoint out of range");
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  IntersectionView view;
  view.n = n;
  view.offsets.assign(n + 1, 0);
  for (VertexId v = 0; v < n; ++v) {
    std::sort(adj[v].begin(), adj[v].end());
    adj[v].erase(std::unique(adj[v].begin(), adj[v].end()), adj[v].end());
    view.offsets[v + 1] = view.offsets[v] + adj[v].size();
  }
  for (VertexId v = 0; v < n; ++v) view.neighbors.insert(view.neighbors.end(), adj[v].begin(), adj[v].end());
  view.witnesses.assign(view.neighbors.size(), 1);
  return view;
}

std::vector<double> sample_weights(const WeightSpec& spec, std::size_t count, std::uint64_t seed, StreamKind kind) {
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    Stream stream(seed, kind, i);
    out[i] = sample(spec, stream);
  }
  return out;
}

BipartiteIncidence generate_naive(const ModelParams& params, int threads) {
  params.validate();
  const double pairs = static_cast<double>(params.n) * static_cast<double>(params.m);
  if (pairs > kNaivePairCap) {
    std::ostringstream msg;
    msg << "naive generator refuses n*m = " << pairs << " > " << kNaivePairCap;
    throw Error(ErrorCode::SizeGuard, msg.str());
  }
  BipartiteIncidence out{params.n, params.m, std::vector<std::vector<VertexId>>(params.m),
                         sample_weights(params.p1, params.m, params.seed, StreamKind::AttributeWeight),
                         sample_weights(params.p2, params.n, params.seed, StreamKind::VertexWeight)};
  const double inv_root = 1.0 / std::sqrt(pairs);
  const auto m = static_cast<std::int64_t>(params.m);

#pragma omp parallel for schedule(dynamic, 64) num_threads(threads)
  for (std::int64_t i = 0; i < m; ++i) {
    Stream stream(params.seed, StreamKind::NaiveEdges, static_cast<std::uint64_t>(i));
    const double xi = out.x[static_cast<std::size_t>(i)] * inv_root;
    auto& list = out.members[static_cast<std::size_t>(i)];
    for (VertexId j = 0; j < params.n; ++j) {
      // u < 1 always, so p >= 1 links with certainty.
      if (stream.uniform() < xi * out.y[j]) list.push_back(j);
    }
  }
  return out;
}

BipartiteIncidence generate_fast(const ModelParams& params, int threads) {
  params.validate();
  BipartiteIncidence out{params.n, params.m, std::vector<std::vector<VertexId>>(params.m),
                         sample_weights(params.p1, params.m, params.seed, StreamKind::AttributeWeight),
                         sample_weights(params.p2, params.n, params.seed, StreamKind::VertexWeight)};
  const double inv_root = 1.0 / std::sqrt(static_cast<double>(params.n) * static_cast<double>(params.m));
  const std::vector<Bucket> buckets = bucket_vertices(out.y);
  const auto m = static_cast<std::int64_t>(params.m);

#pragma omp parallel for schedule(dynamic, 256) num_threads(threads)
  for (std::int64_t i = 0; i < m; ++i) {
    const double xi = out.x[static_cast<std::size_t>(i)] * inv_root;
    if (!(xi > 0.0)) continue;
    Stream stream(params.seed, StreamKind::FastEdges, static_cast<std::uint64_t>(i));
    auto& list = out.members[static_cast<std::size_t>(i)];
    for (const auto& bucket : buckets) {
      const double envelope = std::min(1.0, xi * bucket.y_max);
      const std::size_t size = bucket.ids.size();
      if (envelope >= 1.0) {
        for (VertexId j : bucket.ids) {
          const double p = xi * out.y[j];
          if (p >= 1.0 || stream.uniform() < p) list.push_back(j);
        }
        continue;
      }
      const double log_miss = std::log1p(-envelope);
      std::size_t pos = 0;
      while (true) {
        const double skip = std::floor(std::log(stream.uniform_positive()) / log_miss);
        if (skip >= static_cast<double>(size - pos)) break;
        pos += static_cast<std::size_t>(skip);
        const VertexId j = bucket.ids[pos];
        const double p = xi * out.y[j];
        if (p >= envelope || stream.uniform() * envelope < p) list.push_back(j);
        if (++pos >= size) break;
      }
    }
    std::sort(list.begin(), list.end());
  }
  return out;
}

IntersectionView build_intersection(const BipartiteIncidence& incidence, std::uint64_t cap, int threads) {
  const std::uint32_t n = incidence.n;
  double squares = 0.0;
  std::size_t largest = 0;
  for (const auto& list : incidence.members) {
    squares += static_cast<double>(list.size()) * static_cast<double>(list.size());
    largest = std::max(largest, list.size());
  }
  if (squares > static_cast<double>(cap)) {
    std::ostringstream msg;
    msg << "sum |S_w|^2 = " << squares << " exceeds cap " << cap << "; largest attribute has " << largest
        << " members";
    throw Error(ErrorCode::CapExceeded, msg.str());
  }

  // Raw adjacency with one entry per witnessing attribute.
  std::vector<std::size_t> raw_offsets(n + 1, 0);
  for (const auto& list : incidence.members)
    if (list.size() >= 2)
      for (VertexId v : list) raw_offsets[v + 1] += list.size() - 1;
  for (std::uint32_t v = 0; v < n; ++v) raw_offsets[v + 1] += raw_offsets[v];
  std::vector<VertexId> raw(raw_offsets[n]);
  std::vector<std::size_t> cursor(raw_offsets.begin(), raw_offsets.end() - 1);
  for (const auto& list : incidence.members) {
    if (list.size() < 2) continue;
    for (VertexId u : list)
      for (VertexId v : list)
        if (u != v) raw[cursor[u]++] = v;
  }

  // Sort and deduplicate each vertex range in place, counting multiplicities.
  std::vector<std::uint32_t> raw_witness(raw.size(), 0);
  std::vector<std::size_t> unique_count(n, 0);
  const auto nn = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(dynamic, 1024) num_threads(threads)
  for (std::int64_t vi = 0; vi < nn; ++vi) {
    const auto v = static_cast<std::size_t>(vi);
    auto first = raw.begin() + static_cast<std::ptrdiff_t>(raw_offsets[v]);
    auto last = raw.begin() + static_cast<std::ptrdiff_t>(raw_offsets[v + 1]);
    std::sort(first, last);
    std::size_t write = raw_offsets[v];
    for (std::size_t read = raw_offsets[v]; read < raw_offsets[v + 1]; ++read) {
      if (read > raw_offsets[v] && raw[read] == raw[write - 1]) {
        ++raw_witness[write - 1];
      } else {
        raw[write] = raw[read];
        raw_witness[write] = 1;
        ++write;
      }
    }
    unique_count[v] = write - raw_offsets[v];
  }

  IntersectionView view;
  view.n = n;
  view.offsets.assign(n + 1, 0);
  for (std::uint32_t v = 0; v < n; ++v) view.offsets[v + 1] = view.offsets[v] + unique_count[v];
  view.neighbors.resize(view.offsets[n]);
  view.witnesses.resize(view.offsets[n]);
  for (std::uint32_t v = 0; v < n; ++v) {
    std::copy_n(raw.begin() + static_cast<std::ptrdiff_t>(raw_offsets[v]), unique_count[v],
                view.neighbors.begin() + static_cast<std::ptrdiff_t>(view.offsets[v]));
    std::copy_n(raw_witness.begin() + static_cast<std::ptrdiff_t>(raw_offsets[v]), unique_count[v],
                view.witnesses.begin() + static_cast<std::ptrdiff_t>(view.offsets[v]));
  }
  return view;
}

void write_incidence_csv(std::ostream& out, const BipartiteIncidence& incidence) {
  out << "attribute_id,vertex_id\n";
  for (std::size_t i = 0; i < incidence.members.size(); ++i)
    for (VertexId v : incidence.members[i]) out << i << ',' << v << '\n';
}

void write_weights_csv(std::ostream& out, std::span<const double> weights) {
  out << "id,weight\n";
  char buf[32];
  for (std::size_t i = 0; i < weights.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", weights[i]);
    out << i << ',' << buf << '\n';
  }
}

}  // namespace rig
