#include "gkdv/nonlinearity.hpp"

#include <cmath>
#include <cstdlib>
#include <sstream>
#include <stdexcept>

#include "gkdv/errors.hpp"

namespace gkdv {

namespace {

constexpr double kIntTol = 1e-9;

bool is_integral(double e) { return std::abs(e - std::round(e)) < kIntTol; }

// u^e for integral e >= 0 by repeated squaring; exact for the moderate exponents used here.
double powi(double u, long e) {
    double r = 1.0, b = u;
    for (; e > 0; e >>= 1) {
        if (e & 1) r *= b;
        b *= b;
    }
    return r;
}

double mono_pow(double u, double e) {
    if (is_integral(e)) {
        long n = std::lround(e);
        if (n >= 0) return powi(u, n);
        return 1.0 / powi(u, -n);
    }
    if (u < 0.0) throw NegativeBase("non-integer exponent evaluated at negative base");
    return std::pow(u, e);
}

}  // namespace

Nonlinearity::Nonlinearity(Kind k, std::vector<Term> t) : kind_(k), terms_(std::move(t)) {
    validate();
}

void Nonlinearity::validate() const {
    for (const auto& t : terms_) {
        if (!(t.exp > 1.0))
            throw std::invalid_argument("nonlinearity exponents must exceed 1 (f(0)=f'(0)=0)");
        if (t.coef == 0.0) throw std::invalid_argument("zero coefficient in nonlinearity");
    }
    if (terms_.empty()) throw std::invalid_argument("empty nonlinearity");
}

Nonlinearity Nonlinearity::power(double p) { return Nonlinearity(Kind::power, {{-1.0, p}}); }

Nonlinearity Nonlinearity::kdv() { return Nonlinearity(Kind::power, {{-3.0, 2.0}}); }

Nonlinearity Nonlinearity::minus_family(double A, double p, double B, double q) {
    if (!(A > 0 && B > 0 && p < q))
        throw std::invalid_argument("minus family requires A,B > 0 and p < q");
    return Nonlinearity(Kind::minus, {{-A, p}, {B, q}});
}

Nonlinearity Nonlinearity::plus_family(double A, double p, double B, double q, double C, double r,
                                       double u_max) {
    if (!(A > 0 && B > 0 && C > 0 && p < q && q < r))
        throw std::invalid_argument("plus family requires positive coefficients and p < q < r");
    Nonlinearity nl(Kind::plus, {{A, p}, {-B, q}, {C, r}});
    // f must dip negative somewhere on (0, u_max]; scan a geometric grid of 1e4 points.
    const int K = 10000;
    double lo = u_max * 1e-6;
    bool negative = false;
    for (int k = 0; k <= K && !negative; ++k) {
        double u = lo * std::pow(u_max / lo, double(k) / K);
        negative = nl.eval(u, 0) < 0.0;
    }
    if (!negative)
        throw std::invalid_argument("plus family: f does not take negative values on (0, u_max]");
    return nl;
}

Nonlinearity Nonlinearity::custom(std::vector<Term> terms) {
    return Nonlinearity(Kind::custom, std::move(terms));
}

double Nonlinearity::eval(double u, int order) const {
    if (order < 0 || order > 3) throw std::invalid_argument("eval order must be in 0..3");
    double s = 0.0;
    for (const auto& t : terms_) {
        double fall = 1.0;
        for (int k = 0; k < order; ++k) fall *= t.exp - k;
        if (fall == 0.0) continue;  // integral exponent below the order
        double e = t.exp - order;
        if (u == 0.0) {
            if (e > kIntTol) continue;                     // 0^positive = 0
            if (std::abs(e) <= kIntTol) s += t.coef * fall;  // constant term survives
            else
                throw std::domain_error("derivative of fractional monomial singular at 0");
            continue;
        }
        s += t.coef * fall * mono_pow(u, e);
    }
    return s;
}

double Nonlinearity::primitive(double u) const {
    if (u == 0.0) return 0.0;
    double s = 0.0;
    for (const auto& t : terms_) s += t.coef / (t.exp + 1.0) * mono_pow(u, t.exp + 1.0);
    return s;
}

bool Nonlinearity::integer_exponents() const {
    for (const auto& t : terms_)
        if (!is_integral(t.exp)) return false;
    return true;
}

void Nonlinearity::eval_array(const double* u, double* out, std::size_t n) const {
    if (integer_exponents()) {
        std::vector<long> exps;
        exps.reserve(terms_.size());
        for (const auto& t : terms_) exps.push_back(std::lround(t.exp));
        for (std::size_t i = 0; i < n; ++i) {
            double s = 0.0;
            for (std::size_t k = 0; k < terms_.size(); ++k)
                s += terms_[k].coef * powi(u[i], exps[k]);
            out[i] = s;
        }
        return;
    }
    for (std::size_t i = 0; i < n; ++i) out[i] = eval(u[i], 0);
}

nlohmann::json Nonlinearity::to_json() const {
    static const char* names[] = {"power", "minus", "plus", "custom"};
    nlohmann::json terms = nlohmann::json::array();
    for (const auto& t : terms_) terms.push_back({{"coef", t.coef}, {"exp", t.exp}});
    return {{"kind", names[int(kind_)]}, {"terms", terms}};
}

Nonlinearity Nonlinearity::from_json(const nlohmann::json& j) {
    std::string k = j.at("kind").get<std::string>();
    Kind kind;
    if (k == "power") kind = Kind::power;
    else if (k == "minus") kind = Kind::minus;
    else if (k == "plus") kind = Kind::plus;
    else if (k == "custom") kind = Kind::custom;
    else
        throw std::invalid_argument("unknown nonlinearity kind: " + k);
    std::vector<Term> terms;
    for (const auto& t : j.at("terms"))
        terms.push_back({t.at("coef").get<double>(), t.at("exp").get<double>()});
    return Nonlinearity(kind, std::move(terms));
}

namespace {

std::vector<double> parse_csv_numbers(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t pos = 0;
        double v = std::stod(item, &pos);
        if (pos != item.size()) throw std::invalid_argument("bad number: " + item);
        out.push_back(v);
    }
    return out;
}

}  // namespace

Nonlinearity Nonlinearity::parse(const std::string& spec) {
    auto colon = spec.find(':');
    std::string head = spec.substr(0, colon);
    std::string args = colon == std::string::npos ? "" : spec.substr(colon + 1);
    if (head == "kdv") return kdv();
    if (head == "power") {
        auto v = parse_csv_numbers(args);
        if (v.size() != 1) throw std::invalid_argument("power:p expects one argument");
        return power(v[0]);
    }
    if (head == "minus") {
        auto v = parse_csv_numbers(args);
        if (v.size() != 4) throw std::invalid_argument("minus:A,p,B,q expects four arguments");
        return minus_family(v[0], v[1], v[2], v[3]);
    }
    if (head == "plus") {
        auto v = parse_csv_numbers(args);
        if (v.size() != 6)
            throw std::invalid_argument("plus:A,p,B,q,C,r expects six arguments");
        return plus_family(v[0], v[1], v[2], v[3], v[4], v[5]);
    }
    if (head == "custom") {
        std::vector<Term> terms;
        std::stringstream ss(args);
        std::string item;
        while (std::getline(ss, item, ',')) {
            auto caret = item.find('^');
            if (caret == std::string::npos)
                throw std::invalid_argument("custom terms are coef^exp, got: " + item);
            terms.push_back({std::stod(item.substr(0, caret)), std::stod(item.substr(caret + 1))});
        }
        return custom(std::move(terms));
    }
    throw std::invalid_argument("unknown nonlinearity spec: " + spec);
}

std::string Nonlinearity::describe() const {
    std::ostringstream os;
    os << "f(u) =";
    bool first = true;
    for (const auto& t : terms_) {
        if (!first || t.coef < 0) os << (t.coef < 0 ? " - " : " + ");
        double a = std::abs(t.coef);
        if (a != 1.0) os << a << " ";
        os << "u^" << t.exp;
        first = false;
    }
    return os.str();
}

}  // namespace gkdv
