#include "vspc/rlgr.hpp"

#include <algorithm>

#include "vspc/bitio.hpp"

namespace vspc {

using C = RlgrConstants;

void RlgrState::adapt_rice(std::uint64_t u) {
  const std::uint64_t p = u >> rice_k();
  if (p == 0) {
    rice_param -= std::min(rice_param, C::kRiceDown);
  } else if (p > 1) {
    const std::uint64_t step = std::min<std::uint64_t>(p, C::kMaxRice);
    rice_param = static_cast<std::uint32_t>(std::min<std::uint64_t>(rice_param + step, C::kMaxRice));
  }
}

void RlgrState::adapt_no_run(bool zero) {
  if (zero) {
    run_param = std::min(run_param + C::kNoRunUp, C::kMaxRun);
  } else {
    run_param -= std::min(run_param, C::kNoRunDown);
  }
}

void RlgrState::complete_run() { run_param = std::min(run_param + C::kRunUp, C::kMaxRun); }

void RlgrState::partial_run() { run_param -= std::min(run_param, C::kRunDown); }

void golomb_rice_encode(BitWriter& out, std::uint64_t u, int k) {
  const std::uint64_t q = u >> k;
  if (q >= C::kEscapeQuotient) {
    out.put_ones(C::kEscapeQuotient);
    out.put_bits(64, u);
    return;
  }
  out.put_ones(q);
  out.put_bit(false);
  if (k > 0) out.put_bits(k, u & ((std::uint64_t{1} << k) - 1));
}

std::uint64_t golomb_rice_decode(BitReader& in, int k) {
  std::uint64_t q = 0;
  while (q < C::kEscapeQuotient && in.get_bit()) ++q;
  if (q == C::kEscapeQuotient) return in.get_bits(64);
  const std::uint64_t r = k > 0 ? in.get_bits(k) : 0;
  return (q << k) | r;
}

std::vector<std::byte> rlgr_encode(std::span<const std::int64_t> values) {
  BitWriter out;
  RlgrState s;
  std::uint64_t run = 0;
  for (const std::int64_t x : values) {
    const std::uint64_t u = zigzag(x);
    if (!s.run_mode()) {
      golomb_rice_encode(out, u, s.rice_k());
      s.adapt_rice(u);
      s.adapt_no_run(u == 0);
      continue;
    }
    const int k = s.run_k();
    if (u == 0) {
      if (++run == (std::uint64_t{1} << k)) {
        out.put_bit(false);
        run = 0;
        s.complete_run();
      }
      continue;
    }
    out.put_bit(true);
    out.put_bits(k, run);
    run = 0;
    golomb_rice_encode(out, u - 1, s.rice_k());
    s.adapt_rice(u - 1);
    s.partial_run();
  }
  if (run > 0) {
    // Trailing partial run without a terminating symbol.
    out.put_bit(true);
    out.put_bits(s.run_k(), run);
  }
  return out.finish();
}

std::vector<std::int64_t> rlgr_decode(std::span<const std::byte> bytes, std::size_t count,
                                      std::size_t* bytes_consumed) {
  BitReader in(bytes);
  RlgrState s;
  std::vector<std::int64_t> out;
  out.reserve(count);
  while (out.size() < count) {
    if (!s.run_mode()) {
      const std::uint64_t u = golomb_rice_decode(in, s.rice_k());
      s.adapt_rice(u);
      s.adapt_no_run(u == 0);
      out.push_back(unzigzag(u));
      continue;
    }
    const int k = s.run_k();
    const std::size_t remaining = count - out.size();
    if (!in.get_bit()) {
      const std::uint64_t full = std::uint64_t{1} << k;
      if (full > remaining) throw FormatError("rlgr_decode: run exceeds declared symbol count");
      out.insert(out.end(), static_cast<std::size_t>(full), 0);
      s.complete_run();
      continue;
    }
    const std::uint64_t run = in.get_bits(k);
    if (run > remaining) throw FormatError("rlgr_decode: run exceeds declared symbol count");
    out.insert(out.end(), static_cast<std::size_t>(run), 0);
    if (out.size() == count) break;
    const std::uint64_t u = golomb_rice_decode(in, s.rice_k()) + 1;
    s.adapt_rice(u - 1);
    s.partial_run();
    out.push_back(unzigzag(u));
  }
  if (bytes_consumed) *bytes_consumed = in.bytes_consumed();
  return out;
}

}  // namespace vspc
