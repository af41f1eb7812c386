#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace rankdist {

using Elem = std::uint16_t;

/// Whether q = p^e for a prime p; sets p and e when it is.
bool prime_power(long q, long* p = nullptr, long* e = nullptr);

/// GF(q) with q = p^e, elements coded c_0 + c_1 p + ... + c_{e-1} p^{e-1}
/// for the polynomial sum c_i x^i modulo `modulus`. Codes below p form the
/// prime subfield. All arithmetic is table driven.
class Field {
 public:
  /// GF(q) for q prime, 4, 8, or p^2 with p odd.
  static std::shared_ptr<const Field> make(long q);
  /// GF(p^2) = GF(p)[x]/(x^2 - s), s the smallest non-residue mod p (p odd),
  /// or GF(4) for p = 2.
  static std::shared_ptr<const Field> quadratic_extension(long p);

  long p() const { return p_; }
  long e() const { return e_; }
  long q() const { return q_; }
  /// Monic modulus, lowest degree first, length e + 1 (x for prime fields).
  const std::vector<long>& modulus() const { return modulus_; }
  /// The non-residue s with theta^2 = s for odd-p quadratic extensions, else 0.
  long theta_sq() const { return theta_sq_; }

  Elem add(Elem a, Elem b) const { return add_[a * q_ + b]; }
  Elem sub(Elem a, Elem b) const { return add_[a * q_ + neg_[b]]; }
  Elem mul(Elem a, Elem b) const { return mul_[a * q_ + b]; }
  Elem neg(Elem a) const { return neg_[a]; }
  /// Throws std::domain_error for 0.
  Elem inv(Elem a) const;
  /// a^p; for e = 2 this is the order-2 automorphism a + b theta -> a - b theta.
  Elem conj(Elem a) const { return frob_[a]; }
  bool in_prime_subfield(Elem a) const { return a < p_; }

  std::string name() const;

 private:
  Field(long p, long e, std::vector<long> modulus, long theta_sq);

  long p_, e_, q_;
  std::vector<long> modulus_;
  long theta_sq_;
  std::vector<Elem> add_, mul_, neg_, inv_, frob_;
};

using FieldPtr = std::shared_ptr<const Field>;

}  // namespace rankdist
