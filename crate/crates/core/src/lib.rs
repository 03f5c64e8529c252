// Copyright 2026 The cardgas Authors
//
// Licensed under the Apache License, Version 2.0 (the "License"); you may not use this file except
// in compliance with the License. You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software distributed under the License
// is distributed on an "AS IS" BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express
// or implied. See the License for the specific language governing permissions and limitations under
// the License.

//! Grover adaptive search restricted to fixed-cardinality subspaces, simulated
//! on a dense statevector, plus a hybrid ADMM solver for the quartic
//! risk-parity model whose binary block is solved by that search.

pub mod admm;
pub mod bits;
pub mod dicke;
pub mod grover;
pub mod model;
pub mod qdict;
pub mod qsim;
pub mod resources;
