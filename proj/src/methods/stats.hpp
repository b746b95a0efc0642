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

#pragma once

#include "grndiag/core.hpp"

namespace grndiag {

/// Pearson correlation matrix with unit diagonal; rows and columns of
/// constant genes are all zero (diagonal included).
Eigen::MatrixXd correlation_matrix(const ExpressionMatrix& X);

}  // namespace grndiag
