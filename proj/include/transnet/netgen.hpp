#pragma once

#include <array>
#include <cmath>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "transnet/dataio.hpp"
#include "transnet/network.hpp"
#include "transnet/privacy.hpp"
#include "transnet/rng.hpp"

namespace transnet {

// Bernoulli draw of one block-model layer: for i < j, an edge appears with
// probability B(g_i, g_j), mirrored, zero diagonal. Deterministic given seed.
inline BinaryNetwork generate_sbm(const SbmSpec& spec, std::uint64_t seed) {
  spec.validate();
  const int n = spec.theta.n();
  BinaryNetwork net;
  net.adj = Matrix::Zero(n, n);
  RandomStream rs(seed);
  for (int i = 0; i < n; ++i) {
    const int gi = spec.theta.community[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < n; ++j) {
      const int gj = spec.theta.community[static_cast<std::size_t>(j)];
      if (rs.bernoulli(spec.b(gi, gj))) {
        net.adj(i, j) = 1.0;
        net.adj(j, i) = 1.0;
      }
    }
  }
  return net;
}

// Relabels floor(mu_frac * size) nodes per community, each uniformly to one
// of the other k-1 communities. A relabeled node never keeps its community.
inline Membership perturb_membership(const Membership& theta0, double mu_frac,
                                     std::uint64_t seed) {
  theta0.validate();
  if (theta0.k < 2) throw std::invalid_argument("perturb_membership: need k >= 2");
  if (mu_frac < 0.0 || mu_frac > 1.0)
    throw std::invalid_argument("perturb_membership: mu_frac must lie in [0,1]");

  Membership out = theta0;
  RandomStream rs(seed);
  for (int c = 0; c < theta0.k; ++c) {
    std::vector<int> members;
    for (int i = 0; i < theta0.n(); ++i) {
      if (theta0.community[static_cast<std::size_t>(i)] == c) members.push_back(i);
    }
    const int m = static_cast<int>(std::floor(mu_frac * static_cast<double>(members.size())));
    const auto picked = rs.sample_without_replacement(static_cast<int>(members.size()), m);
    for (int p : picked) {
      int alt = static_cast<int>(rs.below(static_cast<std::uint64_t>(theta0.k - 1)));
      if (alt >= c) ++alt;  // skip the original community
      out.community[static_cast<std::size_t>(members[static_cast<std::size_t>(p)])] = alt;
    }
  }
  return out;
}

// One simulation set-up: target block model plus four groups of source
// networks sharing connectivity, membership perturbation, and privacy level.
struct ExperimentConfig {
  int n = 120;
  int k = 3;
  int l = 8;  // number of source networks
  Matrix b0;
  std::array<Matrix, 4> b_groups;
  std::array<double, 4> mu{0.0, 0.0, 0.0, 0.0};
  std::array<double, 4> q{1.0, 1.0, 1.0, 1.0};  // symmetric RR parameter per group
  double q0 = 1.0;                               // target RR parameter
  int reps = 10;
  std::uint64_t seed = 42;

  void validate() const {
    if (n < 2 || k < 2) throw std::invalid_argument("ExperimentConfig: need n >= 2, k >= 2");
    for (double m : mu) {
      if (m < 0.0 || m > 1.0) throw std::invalid_argument("ExperimentConfig: mu entries in [0,1]");
    }
    for (double qq : q) {
      if (!(qq > 0.5 && qq <= 1.0))
        throw std::invalid_argument("ExperimentConfig: q entries must lie in (0.5, 1]");
    }
    if (!(q0 > 0.5 && q0 <= 1.0))
      throw std::invalid_argument("ExperimentConfig: q0 must lie in (0.5, 1]");
  }
};

// Group index of source layer l (1-based) among four contiguous index ranges
// {1..floor(L/4)}, {floor(L/4)+1..floor(L/2)}, {...}, {..L}.
inline int source_group(int l, int l_count) {
  if (l < 1 || l > l_count) throw std::invalid_argument("source_group: layer index out of range");
  const int b1 = l_count / 4;
  const int b2 = l_count / 2;
  const int b3 = (3 * l_count) / 4;
  if (l <= b1) return 0;
  if (l <= b2) return 1;
  if (l <= b3) return 2;
  return 3;
}

// Everything the pipeline consumes plus the ground truth the harness scores
// against. The networks held here are the RR-perturbed releases.
struct Scenario {
  BinaryNetwork target;
  std::vector<BinaryNetwork> sources;
  Membership truth;                      // target membership
  std::vector<Membership> source_truth;  // per-source memberships (empty when unknown)
  PrivacyParams target_params;
  std::vector<PrivacyParams> source_params;
  int k = 0;

  int l_count() const { return static_cast<int>(sources.size()); }
};

// Draws the target and L source networks. Per-layer streams are derived from
// (seed, layer), so generation order is irrelevant and layers independent.
inline Scenario build_scenario(const ExperimentConfig& config, std::uint64_t seed) {
  config.validate();
  if (config.l < 4) throw std::invalid_argument("build_scenario: need L >= 4");

  Scenario s;
  s.k = config.k;
  s.truth = balanced_membership(config.n, config.k);
  s.target_params = PrivacyParams{config.q0, config.q0};

  const BinaryNetwork a0 =
      generate_sbm(SbmSpec{s.truth, config.b0, 0}, derive_seed(seed, {kStreamNetwork, 0}));
  s.target = randomized_response(a0, s.target_params, derive_seed(seed, {kStreamRr, 0}));

  s.sources.reserve(static_cast<std::size_t>(config.l));
  for (int l = 1; l <= config.l; ++l) {
    const int g = source_group(l, config.l);
    const auto gi = static_cast<std::size_t>(g);
    Membership theta_l = perturb_membership(s.truth, config.mu[gi],
                                            derive_seed(seed, {kStreamMembership, static_cast<std::uint64_t>(l)}));
    const BinaryNetwork a_l = generate_sbm(SbmSpec{theta_l, config.b_groups[gi], l},
                                           derive_seed(seed, {kStreamNetwork, static_cast<std::uint64_t>(l)}));
    const PrivacyParams params{config.q[gi], config.q[gi]};
    s.sources.push_back(
        randomized_response(a_l, params, derive_seed(seed, {kStreamRr, static_cast<std::uint64_t>(l)})));
    s.source_params.push_back(params);
    s.source_truth.push_back(std::move(theta_l));
  }
  return s;
}

// On-disk layout: layer_<l>.edgelist (0 = target), labels.txt, meta.txt.
inline void save_scenario(const Scenario& s, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  write_edge_list((fs::path(dir) / "layer_0.edgelist").string(), s.target);
  for (int l = 1; l <= s.l_count(); ++l) {
    write_edge_list((fs::path(dir) / ("layer_" + std::to_string(l) + ".edgelist")).string(),
                    s.sources[static_cast<std::size_t>(l - 1)]);
  }
  write_labels((fs::path(dir) / "labels.txt").string(), s.truth.community);

  std::vector<std::pair<std::string, std::string>> kv;
  kv.emplace_back("n", std::to_string(s.target.n()));
  kv.emplace_back("k", std::to_string(s.k));
  kv.emplace_back("l", std::to_string(s.l_count()));
  kv.emplace_back("q_0", format_double(s.target_params.q));
  kv.emplace_back("qprime_0", format_double(s.target_params.q_prime));
  for (int l = 1; l <= s.l_count(); ++l) {
    const auto& p = s.source_params[static_cast<std::size_t>(l - 1)];
    kv.emplace_back("q_" + std::to_string(l), format_double(p.q));
    kv.emplace_back("qprime_" + std::to_string(l), format_double(p.q_prime));
  }
  write_kv((fs::path(dir) / "meta.txt").string(), kv);
}

inline Scenario load_scenario(const std::string& dir) {
  namespace fs = std::filesystem;
  const auto kv = read_kv((fs::path(dir) / "meta.txt").string());
  const auto need = [&](const std::string& key) {
    const auto it = kv.find(key);
    if (it == kv.end()) throw std::runtime_error("meta.txt: missing key " + key);
    return it->second;
  };
  const int n = std::stoi(need("n"));
  const int k = std::stoi(need("k"));
  const int l_count = std::stoi(need("l"));

  Scenario s;
  s.k = k;
  s.target_params = PrivacyParams{parse_double(need("q_0")), parse_double(need("qprime_0"))};
  s.target = edges_to_network(read_edge_list((fs::path(dir) / "layer_0.edgelist").string()), n);
  for (int l = 1; l <= l_count; ++l) {
    s.sources.push_back(edges_to_network(
        read_edge_list((fs::path(dir) / ("layer_" + std::to_string(l) + ".edgelist")).string()), n));
    s.source_params.push_back(PrivacyParams{parse_double(need("q_" + std::to_string(l))),
                                            parse_double(need("qprime_" + std::to_string(l)))});
  }
  Membership truth;
  truth.community = read_labels((fs::path(dir) / "labels.txt").string());
  truth.k = k;
  if (static_cast<int>(truth.community.size()) != n)
    throw std::runtime_error("labels.txt: expected " + std::to_string(n) + " labels");
  s.truth = std::move(truth);
  return s;
}

}  // namespace transnet
