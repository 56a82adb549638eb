#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "transnet/dataio.hpp"
#include "transnet/privacy.hpp"
#include "transnet/spectral.hpp"
#include "transnet/weighting.hpp"

namespace transnet {

inline constexpr std::uint64_t kSummaryFormatVersion = 1;
inline constexpr char kSummaryMagic[4] = {'T', 'N', 'S', '1'};

// The only message a source site transmits: eigenspace, density estimate and
// public privacy parameters. Never contains adjacency entries, so its size
// is O(nK) rather than O(n^2).
struct SourceSummary {
  Eigenspace eigenspace;
  double rho_hat = 0.0;
  PrivacyParams params;
  int n = 0;
  int k = 0;
  int l = 0;
  std::uint64_t format_version = kSummaryFormatVersion;

  void validate() const {
    if (n != eigenspace.n() || k != eigenspace.k())
      throw std::invalid_argument("SourceSummary: dimensions disagree with eigenspace");
    eigenspace.validate(1e-6);
    params.validate();
  }
};

// Runs at the data owner: debias (optional), eigendecompose, estimate the
// density. The adjacency matrix never escapes this function.
inline SourceSummary local_site_compute(const BinaryNetwork& a_tilde, PrivacyParams params,
                                        int k, bool debias_flag = true,
                                        EigenOrder order = EigenOrder::kAbsDescending) {
  params.validate();
  DebiasedNetwork mat;
  if (debias_flag) {
    mat = debias(a_tilde, params);
  } else {
    mat = DebiasedNetwork{a_tilde.adj, params};
  }
  SourceSummary s;
  s.eigenspace = top_k_eigvecs(mat.mat, k, order).space;
  s.rho_hat = estimate_density(mat).value;
  s.params = params;
  s.n = a_tilde.n();
  s.k = k;
  return s;
}

enum class DecodeErrorKind {
  kBadMagic,
  kUnsupportedVersion,
  kBadHeader,
  kTruncatedPayload,
  kTrailingBytes,
  kInvalidEigenspace,
};

struct DecodeError : std::runtime_error {
  DecodeError(DecodeErrorKind kind_in, const std::string& msg)
      : std::runtime_error("decode: " + msg), kind(kind_in) {}
  DecodeErrorKind kind;
};

namespace detail {

inline void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int b = 0; b < 8; ++b) out.push_back(static_cast<std::uint8_t>((v >> (8 * b)) & 0xff));
}

inline void put_f64(std::vector<std::uint8_t>& out, double v) {
  put_u64(out, std::bit_cast<std::uint64_t>(v));
}

inline std::uint64_t get_u64(const std::uint8_t* p) {
  std::uint64_t v = 0;
  for (int b = 7; b >= 0; --b) v = (v << 8) | p[b];
  return v;
}

inline double get_f64(const std::uint8_t* p) { return std::bit_cast<double>(get_u64(p)); }

}  // namespace detail

// Wire frame: magic "TNS1", then version, n, k, l as 8-byte little-endian
// integers, q, q', rho_hat as 8-byte little-endian doubles, then the
// row-major eigenspace payload (n*k doubles). Bit-exact round trip.
inline std::vector<std::uint8_t> encode(const SourceSummary& s) {
  s.validate();
  std::vector<std::uint8_t> out;
  out.reserve(60 + static_cast<std::size_t>(s.n) * static_cast<std::size_t>(s.k) * 8);
  out.insert(out.end(), kSummaryMagic, kSummaryMagic + 4);
  detail::put_u64(out, s.format_version);
  detail::put_u64(out, static_cast<std::uint64_t>(s.n));
  detail::put_u64(out, static_cast<std::uint64_t>(s.k));
  detail::put_u64(out, static_cast<std::uint64_t>(s.l));
  detail::put_f64(out, s.params.q);
  detail::put_f64(out, s.params.q_prime);
  detail::put_f64(out, s.rho_hat);
  for (int i = 0; i < s.n; ++i) {
    for (int j = 0; j < s.k; ++j) detail::put_f64(out, s.eigenspace.basis(i, j));
  }
  return out;
}

inline SourceSummary decode(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kSummaryMagic, 4) != 0)
    throw DecodeError(DecodeErrorKind::kBadMagic, "bad magic");
  if (bytes.size() < 60) throw DecodeError(DecodeErrorKind::kTruncatedPayload, "truncated header");
  const std::uint8_t* p = bytes.data() + 4;
  const std::uint64_t version = detail::get_u64(p);
  if (version != kSummaryFormatVersion)
    throw DecodeError(DecodeErrorKind::kUnsupportedVersion,
                      "unsupported format version " + std::to_string(version));
  const std::uint64_t n = detail::get_u64(p + 8);
  const std::uint64_t k = detail::get_u64(p + 16);
  const std::uint64_t l = detail::get_u64(p + 24);
  if (k < 1 || n < k || n > (1u << 24) || l > (1u << 24))
    throw DecodeError(DecodeErrorKind::kBadHeader, "implausible dimensions in header");

  SourceSummary s;
  s.format_version = version;
  s.n = static_cast<int>(n);
  s.k = static_cast<int>(k);
  s.l = static_cast<int>(l);
  s.params.q = detail::get_f64(p + 32);
  s.params.q_prime = detail::get_f64(p + 40);
  s.rho_hat = detail::get_f64(p + 48);

  const std::size_t expected = 60 + static_cast<std::size_t>(n) * k * 8;
  if (bytes.size() < expected)
    throw DecodeError(DecodeErrorKind::kTruncatedPayload, "truncated payload");
  if (bytes.size() > expected)
    throw DecodeError(DecodeErrorKind::kTrailingBytes, "trailing bytes after payload");

  s.eigenspace.basis.resize(s.n, s.k);
  const std::uint8_t* payload = bytes.data() + 60;
  for (int i = 0; i < s.n; ++i) {
    for (int j = 0; j < s.k; ++j) {
      s.eigenspace.basis(i, j) = detail::get_f64(payload);
      payload += 8;
    }
  }
  if (s.eigenspace.orthonormality_error() > 1e-6)
    throw DecodeError(DecodeErrorKind::kInvalidEigenspace, "invalid eigenspace (not orthonormal)");
  try {
    s.params.validate();
  } catch (const std::exception& e) {
    throw DecodeError(DecodeErrorKind::kBadHeader, e.what());
  }
  return s;
}

// CSV debug encoding: header row n,k,l,q,qprime,rho_hat,version then one row
// per node with the eigenspace entries.
inline std::string encode_csv(const SourceSummary& s) {
  s.validate();
  std::string out = "n,k,l,q,qprime,rho_hat,version\n";
  out += std::to_string(s.n) + "," + std::to_string(s.k) + "," + std::to_string(s.l) + "," +
         format_double(s.params.q) + "," + format_double(s.params.q_prime) + "," +
         format_double(s.rho_hat) + "," + std::to_string(s.format_version) + "\n";
  for (int i = 0; i < s.n; ++i) {
    for (int j = 0; j < s.k; ++j) {
      out += format_double(s.eigenspace.basis(i, j));
      out += (j + 1 == s.k) ? '\n' : ',';
    }
  }
  return out;
}

inline void save_summary(const SourceSummary& s, const std::string& path) {
  const auto bytes = encode(s);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

inline SourceSummary load_summary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return decode(bytes);
}

}  // namespace transnet
