#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace gkdv {

// Finite signed-monomial sum f(u) = sum_k coef_k * u^{exp_k}, exponents > 1 so that
// f(0) = f'(0) = 0 holds exactly. The primitive F is term-by-term with F(0) = 0.
class Nonlinearity {
public:
    struct Term {
        double coef;
        double exp;  // > 1
    };

    enum class Kind { power, minus, plus, custom };

    // f(u) = -u^p
    static Nonlinearity power(double p);
    // f(u) = -3u^2 (classical KdV normalization)
    static Nonlinearity kdv();
    // f(u) = -A u^p + B u^q, p < q, A,B > 0
    static Nonlinearity minus_family(double A, double p, double B, double q);
    // f(u) = +A u^p - B u^q + C u^r, p < q < r; must take negative values on (0, u_max]
    static Nonlinearity plus_family(double A, double p, double B, double q, double C, double r,
                                    double u_max = 10.0);
    static Nonlinearity custom(std::vector<Term> terms);

    // k-th derivative f^{(order)}(u), order in 0..3
    double eval(double u, int order = 0) const;
    // F(u), F(0) = 0
    double primitive(double u) const;

    // max_k |d/du f evaluated termwise|... convenience: true if every exponent is integral
    bool integer_exponents() const;

    // Fast f(u) over an array; integer exponents use repeated multiplication.
    void eval_array(const double* u, double* out, std::size_t n) const;

    Kind kind() const { return kind_; }
    const std::vector<Term>& terms() const { return terms_; }

    nlohmann::json to_json() const;
    static Nonlinearity from_json(const nlohmann::json& j);

    // Parse CLI specs: "kdv", "power:6", "minus:1,6,1,8", "plus:A,p,B,q,C,r",
    // "custom:coef^exp,coef^exp,...". Throws std::invalid_argument on malformed input.
    static Nonlinearity parse(const std::string& spec);
    std::string describe() const;

private:
    Nonlinearity(Kind k, std::vector<Term> t);
    void validate() const;

    Kind kind_;
    std::vector<Term> terms_;
};

}  // namespace gkdv
