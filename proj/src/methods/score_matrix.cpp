/*
 * Copyright 2026 The grndiag Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <string>

#include "grndiag/methods.hpp"

namespace grndiag {

void ScoreMatrix::check_invariants() const {
    const std::string who = method_name.empty() ? "score matrix" : method_name;
    if (S.rows() != S.cols()) throw Error(who + ": not square");
    if (!S.allFinite()) throw Error(who + ": non-finite score");
    if ((S.array() < 0.0).any()) throw Error(who + ": negative score");
    if ((S.diagonal().array() != 0.0).any()) throw Error(who + ": nonzero diagonal");
    if (symmetric && S != S.transpose()) throw Error(who + ": flagged symmetric but S != S^T");
}

std::string_view to_string(Method m) {
    switch (m) {
        case Method::pearson: return "pearson";
        case Method::mi: return "mi";
        case Method::genie3: return "genie3";
        case Method::pc: return "pc";
        case Method::ges: return "ges";
        case Method::notears: return "notears";
    }
    return "unknown";
}

Method parse_method(std::string_view name) {
    for (Method m : kAllMethods) {
        if (to_string(m) == name) return m;
    }
    throw Error("unknown method '" + std::string(name) + "' (valid: pearson, mi, genie3, pc, ges, notears)");
}

ScoreMatrix run_method(Method m, const ExpressionMatrix& X, std::uint64_t seed) {
    switch (m) {
        case Method::pearson: return pearson_scores(X);
        case Method::mi: return mi_scores(X);
        case Method::genie3: return genie3_scores(X, seed);
        case Method::pc: return pc_scores(X);
        case Method::ges: return ges_scores(X);
        case Method::notears: return notears_scores(X);
    }
    throw Error("unhandled method");
}

}  // namespace grndiag
