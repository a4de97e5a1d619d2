#include "covclose/circuit.hpp"

#include <utility>

namespace covclose::sat {

namespace {
enum Op { kAnd, kXor, kMux };
}

Circuit::Circuit(Solver& solver) : solver_(&solver) {
  true_ = fresh();
  solver_->add_clause({true_});
}

Lit Circuit::land(Lit a, Lit b) {
  if (is_false(a) || is_false(b) || a == ~b) return constant(false);
  if (is_true(a) || a == b) return b;
  if (is_true(b)) return a;
  if (b < a) std::swap(a, b);
  const Key key{kAnd, a.x, b.x, 0};
  if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  const Lit out = fresh();
  solver_->add_clause({~out, a});
  solver_->add_clause({~out, b});
  solver_->add_clause({out, ~a, ~b});
  cache_.emplace(key, out);
  return out;
}

Lit Circuit::lxor(Lit a, Lit b) {
  if (is_const(a)) return is_true(a) ? ~b : b;
  if (is_const(b)) return is_true(b) ? ~a : a;
  if (a == b) return constant(false);
  if (a == ~b) return constant(true);
  // Normalise polarity so that xor(a,b), xor(~a,~b) share a gate.
  bool flip = false;
  if (a.negated()) {
    a = ~a;
    flip = !flip;
  }
  if (b.negated()) {
    b = ~b;
    flip = !flip;
  }
  if (b < a) std::swap(a, b);
  const Key key{kXor, a.x, b.x, 0};
  Lit out;
  if (auto it = cache_.find(key); it != cache_.end()) {
    out = it->second;
  } else {
    out = fresh();
    solver_->add_clause({~out, a, b});
    solver_->add_clause({~out, ~a, ~b});
    solver_->add_clause({out, ~a, b});
    solver_->add_clause({out, a, ~b});
    cache_.emplace(key, out);
  }
  return flip ? ~out : out;
}

Lit Circuit::mux(Lit s, Lit t, Lit e) {
  if (is_true(s)) return t;
  if (is_false(s)) return e;
  if (t == e) return t;
  if (is_true(t)) return lor(s, e);
  if (is_false(t)) return land(~s, e);
  if (is_true(e)) return lor(~s, t);
  if (is_false(e)) return land(s, t);
  if (t == s) return lor(s, e);
  if (t == ~s) return land(~s, e);
  if (e == s) return land(s, t);
  if (e == ~s) return lor(~s, t);
  if (t == ~e) return ~lxor(s, t);  // s ? t : ~t
  if (s.negated()) {
    s = ~s;
    std::swap(t, e);
  }
  const Key key{kMux, s.x, t.x, e.x};
  if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  const Lit out = fresh();
  solver_->add_clause({~s, ~t, out});
  solver_->add_clause({~s, t, ~out});
  solver_->add_clause({s, ~e, out});
  solver_->add_clause({s, e, ~out});
  solver_->add_clause({~t, ~e, out});
  solver_->add_clause({t, e, ~out});
  cache_.emplace(key, out);
  return out;
}

Lit Circuit::and_all(std::span<const Lit> lits) {
  Lit acc = constant(true);
  for (Lit l : lits) acc = land(acc, l);
  return acc;
}

Lit Circuit::or_all(std::span<const Lit> lits) {
  Lit acc = constant(false);
  for (Lit l : lits) acc = lor(acc, l);
  return acc;
}

Word Circuit::word(std::int32_t value) const {
  Word w;
  const auto bits = static_cast<std::uint32_t>(value);
  for (int i = 0; i < 32; ++i) w[static_cast<std::size_t>(i)] = constant(((bits >> i) & 1U) != 0);
  return w;
}

Word Circuit::fresh_word() {
  Word w;
  for (auto& l : w) l = fresh();
  return w;
}

Word Circuit::mux(Lit s, const Word& t, const Word& e) {
  Word w;
  for (std::size_t i = 0; i < 32; ++i) w[i] = mux(s, t[i], e[i]);
  return w;
}

Word Circuit::from_bool(Lit b) const {
  Word w = word(0);
  w[0] = b;
  return w;
}

Lit Circuit::nonzero(const Word& w) { return or_all(w); }

Lit Circuit::add_bit(Lit a, Lit b, Lit carry_in, Lit& carry_out) {
  const Lit ab = lxor(a, b);
  carry_out = lor(land(a, b), land(carry_in, ab));
  return lxor(ab, carry_in);
}

Word Circuit::add_with_carry(const Word& a, const Word& b, Lit carry) {
  Word sum;
  for (std::size_t i = 0; i < 32; ++i) sum[i] = add_bit(a[i], b[i], carry, carry);
  return sum;
}

Word Circuit::add(const Word& a, const Word& b) { return add_with_carry(a, b, constant(false)); }

Word Circuit::sub(const Word& a, const Word& b) {
  Word nb;
  for (std::size_t i = 0; i < 32; ++i) nb[i] = ~b[i];
  return add_with_carry(a, nb, constant(true));
}

Word Circuit::neg(const Word& a) { return sub(word(0), a); }

Word Circuit::mul(const Word& a, const Word& b) {
  Word acc = word(0);
  for (std::size_t i = 0; i < 32; ++i) {
    if (is_false(b[i])) continue;
    Word partial = word(0);
    for (std::size_t j = 0; i + j < 32; ++j) partial[i + j] = land(a[j], b[i]);
    acc = add(acc, partial);
  }
  return acc;
}

void Circuit::udivrem(const Word& a, const Word& b, Word& quotient, Word& remainder) {
  // Restoring division over a 33-bit partial remainder.
  std::array<Lit, 33> rem;
  rem.fill(constant(false));
  for (int i = 31; i >= 0; --i) {
    for (std::size_t j = 32; j > 0; --j) rem[j] = rem[j - 1];
    rem[0] = a[static_cast<std::size_t>(i)];
    // diff = rem - b (33 bits), no borrow iff rem >= b
    std::array<Lit, 33> diff;
    Lit carry = constant(true);
    for (std::size_t j = 0; j < 33; ++j) {
      const Lit nb = j < 32 ? ~b[j] : constant(true);
      diff[j] = add_bit(rem[j], nb, carry, carry);
    }
    const Lit ge = carry;
    quotient[static_cast<std::size_t>(i)] = ge;
    for (std::size_t j = 0; j < 33; ++j) rem[j] = mux(ge, diff[j], rem[j]);
  }
  for (std::size_t j = 0; j < 32; ++j) remainder[j] = rem[j];
}

void Circuit::sdivrem(const Word& a, const Word& b, Word& quotient, Word& remainder) {
  const Lit sa = a[31];
  const Lit sb = b[31];
  const Word abs_a = mux(sa, neg(a), a);
  const Word abs_b = mux(sb, neg(b), b);
  Word uq;
  Word ur;
  udivrem(abs_a, abs_b, uq, ur);
  quotient = mux(lxor(sa, sb), neg(uq), uq);
  remainder = mux(sa, neg(ur), ur);
}

Lit Circuit::eq(const Word& a, const Word& b) {
  Lit acc = constant(true);
  for (std::size_t i = 0; i < 32; ++i) acc = land(acc, iff(a[i], b[i]));
  return acc;
}

Lit Circuit::ult(const Word& a, const Word& b) {
  Lit lt = constant(false);
  for (std::size_t i = 0; i < 32; ++i) {
    // the higher bit decides unless equal
    lt = mux(lxor(a[i], b[i]), b[i], lt);
  }
  return lt;
}

Lit Circuit::slt(const Word& a, const Word& b) {
  Word fa = a;
  Word fb = b;
  fa[31] = ~a[31];
  fb[31] = ~b[31];
  return ult(fa, fb);
}

std::int32_t Circuit::value(const Word& w) const {
  std::uint32_t bits = 0;
  for (std::size_t i = 0; i < 32; ++i) {
    if (solver_->model_value(w[i])) bits |= 1U << i;
  }
  return static_cast<std::int32_t>(bits);
}

}  // namespace covclose::sat
