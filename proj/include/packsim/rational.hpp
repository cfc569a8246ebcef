#pragma once

// Exact rational arithmetic (GMP mpq) plus parsing helpers. All planner and
// rational-mode LP math goes through Rational so equality tests like
// rho_j == sum_l k_j^(l) z^(l) are exact.

#include <gmpxx.h>

#include <cctype>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <json.hpp>

namespace packsim {

using Rational = mpq_class;

inline Rational make_rational(long num, long den = 1) {
    if (den == 0) throw std::invalid_argument("rational with zero denominator");
    Rational r(num, den);
    r.canonicalize();
    return r;
}

// mpq_class(num, den) does not canonicalize; every ratio must go through
// here (or an explicit canonicalize()) before arithmetic.
inline Rational ratio(long long num, long long den) {
    return make_rational(static_cast<long>(num), static_cast<long>(den));
}

inline Rational from_ll(long long v) { return Rational(static_cast<long>(v)); }

inline double to_double(const Rational& r) { return r.get_d(); }

inline std::string to_string(const Rational& r) { return r.get_str(); }

// Accepts "p/q", integers, and decimal literals ("0.6", "-1.25", "3e2").
// Decimals parse exactly: digits over a power of ten.
inline Rational parse_rational(const std::string& text) {
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
    if (s.empty()) throw std::invalid_argument("empty rational literal");

    if (auto slash = s.find('/'); slash != std::string::npos) {
        mpz_class num(s.substr(0, slash)), den(s.substr(slash + 1));
        if (den == 0) throw std::invalid_argument("zero denominator: " + text);
        Rational r(num, den);
        r.canonicalize();
        return r;
    }

    bool neg = false;
    std::size_t i = 0;
    if (s[i] == '+' || s[i] == '-') neg = (s[i++] == '-');
    std::string digits;
    long frac_digits = 0;
    bool seen_dot = false, any_digit = false;
    for (; i < s.size() && (std::isdigit(static_cast<unsigned char>(s[i])) || s[i] == '.'); ++i) {
        if (s[i] == '.') {
            if (seen_dot) throw std::invalid_argument("bad rational literal: " + text);
            seen_dot = true;
        } else {
            digits.push_back(s[i]);
            any_digit = true;
            if (seen_dot) ++frac_digits;
        }
    }
    long exp10 = 0;
    if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
        exp10 = std::stol(s.substr(i + 1));
        i = s.size();
    }
    if (!any_digit || i != s.size()) throw std::invalid_argument("bad rational literal: " + text);

    mpz_class num(digits.empty() ? "0" : digits);
    if (neg) num = -num;
    long net = exp10 - frac_digits;
    mpz_class pow10;
    mpz_ui_pow_ui(pow10.get_mpz_t(), 10, static_cast<unsigned long>(net < 0 ? -net : net));
    Rational r;
    if (net >= 0)
        r = Rational(num * pow10);
    else
        r = Rational(num, pow10);
    r.canonicalize();
    return r;
}

// JSON numeric fields may be integers (exact), strings ("4/3", "0.6" — parsed
// exactly), or floating numbers (converted from their exact binary value).
inline Rational rational_from_json(const nlohmann::json& j) {
    if (j.is_string()) return parse_rational(j.get<std::string>());
    if (j.is_number_integer()) return Rational(static_cast<long>(j.get<std::int64_t>()));
    if (j.is_number_float()) return Rational(j.get<double>());
    throw std::invalid_argument("expected number or rational string, got: " + j.dump());
}

}  // namespace packsim
