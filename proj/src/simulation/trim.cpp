#include <set>

#include "sca/simulation.hpp"

namespace sca {

namespace {

std::string tokens_of(const Alphabet& al, const Symbols& w) {
  std::string out;
  for (Symbol s : w) out += (out.empty() ? "" : " ") + al.token(s);
  return out;
}

}  // namespace

Injection injection_by_name(const Alphabet& sub, const Alphabet& host) {
  Injection i{sub, {}};
  for (const auto& tok : sub.tokens()) {
    auto s = host.find(tok);
    if (!s) throw ShapeError("injection_by_name: state " + tok + " missing from host alphabet");
    i.image.push_back(*s);
  }
  return i;
}

Sca check_restriction(const Sca& a, const Injection& i, const Budget& budget) {
  const std::size_t nq = a.states().size(), ns = i.source.size();
  if (i.image.size() != ns) throw ShapeError("injection: one image per source state required");
  std::vector<int> pre(nq, -1);
  for (Symbol s = 0; s < ns; ++s) {
    if (i.image[s] >= nq) throw ShapeError("injection: image out of range");
    if (pre[i.image[s]] >= 0) throw ShapeError("injection: not injective");
    pre[i.image[s]] = static_cast<int>(s);
  }
  const std::size_t nv = a.v().size();
  Symbols sub(nv, 0), full(nv);
  do {
    for (std::size_t j = 0; j < nv; ++j) full[j] = i.image[sub[j]];
    const std::uint64_t qi = word_index(full.data(), nv, nq);
    for (std::uint64_t r = 0; r < a.r_words(); ++r)
      if (pre[a.at(qi, r)] < 0) {
        Symbols rw(a.v_prime().size());
        word_from_index(r, rw.size(), a.random().size(), rw.data());
        throw StabilityError("restriction not stable: neighbourhood " + tokens_of(i.source, sub) +
                                 " with random " + tokens_of(a.random(), rw) + " yields " +
                                 a.states().token(a.at(qi, r)),
                             sub, rw);
      }
  } while (next_word(sub, ns));
  std::vector<Symbol> image = i.image;
  return Sca::from_rule(
      i.source, a.random(), a.v(), a.v_prime(),
      [&](std::span<const Symbol> q, std::span<const Symbol> r) {
        for (std::size_t j = 0; j < nv; ++j) full[j] = image[q[j]];
        return static_cast<Symbol>(pre[a.apply(full.data(), r.data())]);
      },
      budget);
}

Sca check_projection(const Sca& a, const Surjection& pi, const Budget& budget) {
  const std::size_t nq = a.states().size(), nt = pi.target.size();
  if (pi.image.size() != nq) throw ShapeError("surjection: one image per state required");
  std::set<Symbol> hit;
  for (Symbol s : pi.image) {
    if (s >= nt) throw ShapeError("surjection: image out of range");
    hit.insert(s);
  }
  if (hit.size() != nt) throw ShapeError("surjection: not onto");
  const std::size_t nv = a.v().size();
  const std::uint64_t classes = checked_pow(nt, nv);
  require_within(classes == UINT64_MAX ? UINT64_MAX : classes * a.r_words(), budget.max_table,
                 "projection table");
  // First neighbourhood seen in each projected class, and its outputs.
  std::vector<std::int64_t> rep(classes, -1);
  Symbols w(nv, 0), pw(nv);
  std::uint64_t qi = 0;
  do {
    for (std::size_t j = 0; j < nv; ++j) pw[j] = pi.image[w[j]];
    const std::uint64_t ci = word_index(pw.data(), nv, nt);
    if (rep[ci] < 0) {
      rep[ci] = static_cast<std::int64_t>(qi);
    } else {
      const auto ri = static_cast<std::uint64_t>(rep[ci]);
      for (std::uint64_t r = 0; r < a.r_words(); ++r)
        if (pi.image[a.at(qi, r)] != pi.image[a.at(ri, r)]) {
          Symbols first(nv), rw(a.v_prime().size());
          word_from_index(ri, nv, nq, first.data());
          word_from_index(r, rw.size(), a.random().size(), rw.data());
          throw CompatibilityError("projection not compatible: " + tokens_of(a.states(), first) +
                                       " and " + tokens_of(a.states(), w) + " with random " +
                                       tokens_of(a.random(), rw),
                                   first, w, rw);
        }
    }
    ++qi;
  } while (next_word(w, nq));
  Symbols full(nv);
  return Sca::from_rule(
      pi.target, a.random(), a.v(), a.v_prime(),
      [&](std::span<const Symbol> q, std::span<const Symbol> r) {
        const auto ri = static_cast<std::uint64_t>(rep[word_index(q.data(), nv, nt)]);
        word_from_index(ri, nv, nq, full.data());
        return pi.image[a.apply(full.data(), r.data())];
      },
      budget);
}

}  // namespace sca
