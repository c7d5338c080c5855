#include <set>
#include <sstream>

#include "sca/core.hpp"
#include "sca/simulation.hpp"

namespace sca {

RescaleParams RescaleParams::parse(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string p; std::getline(ss, p, ',');) parts.push_back(p);
  if (parts.size() != 3) throw ParseError("rescale parameters must be m,t,z");
  RescaleParams p;
  try {
    long m = std::stol(parts[0]), t = std::stol(parts[1]);
    if (m < 1 || t < 1) throw ParseError("rescale parameters need m,t >= 1");
    p.m = static_cast<unsigned>(m);
    p.t = static_cast<unsigned>(t);
    p.z = std::stol(parts[2]);
  } catch (const std::logic_error&) {
    throw ParseError("rescale parameters must be integers m,t,z");
  }
  return p;
}

std::string RescaleParams::str() const {
  return std::to_string(m) + "," + std::to_string(t) + "," + std::to_string(z);
}

Symbols pack_word(const Symbols& w, std::size_t m, std::size_t radix) {
  if (m == 0 || w.size() % m != 0) throw ShapeError("pack_word: length must be a multiple of m");
  Symbols out;
  for (std::size_t i = 0; i < w.size(); i += m)
    out.push_back(static_cast<Symbol>(word_index(w.data() + i, m, radix)));
  return out;
}

Symbols unpack_word(const Symbols& w, std::size_t m, std::size_t radix) {
  if (m == 0) throw ShapeError("unpack_word: m must be positive");
  Symbols out(w.size() * m);
  for (std::size_t i = 0; i < w.size(); ++i) word_from_index(w[i], m, radix, out.data() + i * m);
  return out;
}

namespace {

long floor_div(long a, long b) { return a >= 0 ? a / b : -((-a + b - 1) / b); }

struct Fine {
  std::size_t super;  // index into the packed neighbourhood
  std::size_t digit;  // position inside the block
};

}  // namespace

Sca rescale_sca(const Sca& a, const RescaleParams& p, const Budget& budget) {
  if (p.m < 1 || p.t < 1) throw ShapeError("rescale_sca: m and t must be positive");
  const Sca b = iterate_sca(a, static_cast<int>(p.t), budget);
  if (p.m == 1 && p.z == 0) return b;
  const long m = p.m;
  const std::size_t nq = a.states().size(), nr = a.random().size();

  auto packed = [&](const std::vector<int>& fine) {
    std::set<int> s;
    for (long q = 0; q < m; ++q)
      for (int v : fine) s.insert(static_cast<int>(floor_div(q + p.z + v, m)));
    return std::vector<int>(s.begin(), s.end());
  };
  const std::vector<int> vp = packed(b.v()), vpp = packed(b.v_prime());
  auto locate = [&](const std::vector<int>& sup, long y) {
    long s = floor_div(y, m);
    auto it = std::lower_bound(sup.begin(), sup.end(), static_cast<int>(s));
    return Fine{static_cast<std::size_t>(it - sup.begin()), static_cast<std::size_t>(y - s * m)};
  };
  std::vector<std::vector<Fine>> qmap(p.m), rmap(p.m);
  for (long q = 0; q < m; ++q) {
    for (int v : b.v()) qmap[static_cast<std::size_t>(q)].push_back(locate(vp, q + p.z + v));
    for (int v : b.v_prime()) rmap[static_cast<std::size_t>(q)].push_back(locate(vpp, q + p.z + v));
  }
  const std::uint64_t block_r = checked_pow(nr, p.m);
  std::vector<std::uint64_t> q_div(p.m), r_div(p.m), layer_div(p.t);
  for (unsigned i = 0; i < p.m; ++i) {
    q_div[i] = checked_pow(nq, p.m - 1 - i);
    r_div[i] = checked_pow(nr, p.m - 1 - i);
  }
  for (unsigned i = 0; i < p.t; ++i) layer_div[i] = checked_pow(block_r, p.t - 1 - i);

  Symbols q(b.v().size()), r(b.v_prime().size()), out(p.m);
  auto rule = [&](std::span<const Symbol> qw, std::span<const Symbol> rw) {
    for (unsigned c = 0; c < p.m; ++c) {
      for (std::size_t j = 0; j < q.size(); ++j) {
        const Fine& f = qmap[c][j];
        q[j] = static_cast<Symbol>((qw[f.super] / q_div[f.digit]) % nq);
      }
      for (std::size_t j = 0; j < r.size(); ++j) {
        const Fine& f = rmap[c][j];
        std::uint64_t sym = 0;
        for (unsigned layer = 0; layer < p.t; ++layer) {
          std::uint64_t block = (rw[f.super] / layer_div[layer]) % block_r;
          sym = sym * nr + (block / r_div[f.digit]) % nr;
        }
        r[j] = static_cast<Symbol>(sym);
      }
      out[c] = b.apply(q.data(), r.data());
    }
    return static_cast<Symbol>(word_index(out.data(), p.m, nq));
  };
  return Sca::from_rule(power_alphabet(a.states(), p.m),
                        power_alphabet(power_alphabet(a.random(), p.m), p.t), vp, vpp, rule, budget);
}

}  // namespace sca
