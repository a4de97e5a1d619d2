#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <tuple>
#include <unordered_map>

#include "covclose/sat.hpp"

namespace covclose::sat {

/// 32-bit two's-complement word, least significant bit first.
using Word = std::array<Lit, 32>;

/// Tseitin gate builder with constant folding and structural hashing.
class Circuit {
 public:
  explicit Circuit(Solver& solver);

  Solver& solver() { return *solver_; }

  Lit constant(bool b) const { return b ? true_ : ~true_; }
  bool is_const(Lit l) const { return l.var() == true_.var(); }
  bool is_true(Lit l) const { return l == true_; }
  bool is_false(Lit l) const { return l == ~true_; }
  Lit fresh() { return Lit::make(solver_->new_var()); }

  Lit land(Lit a, Lit b);
  Lit lor(Lit a, Lit b) { return ~land(~a, ~b); }
  Lit lxor(Lit a, Lit b);
  Lit iff(Lit a, Lit b) { return ~lxor(a, b); }
  Lit mux(Lit s, Lit t, Lit e);  // s ? t : e
  Lit and_all(std::span<const Lit> lits);
  Lit or_all(std::span<const Lit> lits);

  void assert_lit(Lit l) { solver_->add_clause({l}); }

  Word word(std::int32_t value) const;
  Word fresh_word();
  Word mux(Lit s, const Word& t, const Word& e);
  Word from_bool(Lit b) const;
  Lit nonzero(const Word& w);

  Word add(const Word& a, const Word& b);
  Word sub(const Word& a, const Word& b);
  Word neg(const Word& a);
  Word mul(const Word& a, const Word& b);
  /// Truncating signed division and remainder; undefined when b == 0.
  void sdivrem(const Word& a, const Word& b, Word& quotient, Word& remainder);

  Lit eq(const Word& a, const Word& b);
  Lit ult(const Word& a, const Word& b);
  Lit slt(const Word& a, const Word& b);
  Lit sle(const Word& a, const Word& b) { return ~slt(b, a); }

  std::int32_t value(const Word& w) const;

 private:
  Lit add_bit(Lit a, Lit b, Lit carry_in, Lit& carry_out);
  Word add_with_carry(const Word& a, const Word& b, Lit carry);
  void udivrem(const Word& a, const Word& b, Word& quotient, Word& remainder);

  struct Key {
    int op;
    int a;
    int b;
    int c;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const {
      std::size_t h = static_cast<std::size_t>(k.op);
      for (int x : {k.a, k.b, k.c}) h = h * 1000003U ^ static_cast<std::size_t>(x);
      return h;
    }
  };

  Solver* solver_;
  Lit true_;
  std::unordered_map<Key, Lit, KeyHash> cache_;
};

}  // namespace covclose::sat
