#pragma once

#include <cmath>
#include <string>

#include "pbica/errors.hpp"
#include "pbica/score.hpp"

namespace pbica {

enum class NlKind { tanh, pow3, skew, gauss, learned };

inline NlKind parse_nl_kind(const std::string& s) {
    if (s == "tanh") return NlKind::tanh;
    if (s == "pow3") return NlKind::pow3;
    if (s == "skew") return NlKind::skew;
    if (s == "gauss") return NlKind::gauss;
    if (s == "pbecf" || s == "learned") return NlKind::learned;
    throw input_error("unknown nonlinearity: " + s);
}

inline std::string nl_kind_name(NlKind k) {
    switch (k) {
        case NlKind::tanh: return "tanh";
        case NlKind::pow3: return "pow3";
        case NlKind::skew: return "skew";
        case NlKind::gauss: return "gauss";
        case NlKind::learned: return "pbecf";
    }
    return "?";
}

struct Nonlinearity {
    NlKind kind = NlKind::tanh;
    ScoreTable table;  // used only when kind == learned

    static Nonlinearity fixed(NlKind k) {
        if (k == NlKind::learned)
            throw input_error("learned nonlinearity requires a ScoreTable");
        return Nonlinearity{k, {}};
    }
    static Nonlinearity learned(ScoreTable t) {
        return Nonlinearity{NlKind::learned, std::move(t)};
    }
};

inline GEval nl_eval(const Nonlinearity& nl, double y) {
    switch (nl.kind) {
        case NlKind::tanh: {
            double t = std::tanh(y);
            return {t, 1.0 - t * t};
        }
        case NlKind::pow3:
            return {y * y * y, 3.0 * y * y};
        case NlKind::skew:
            return {y * y, 2.0 * y};
        case NlKind::gauss: {
            double e = std::exp(-0.5 * y * y);
            return {y * e, (1.0 - y * y) * e};
        }
        case NlKind::learned:
            return eval_g(nl.table, y);
    }
    return {};
}

}  // namespace pbica
