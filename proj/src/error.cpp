// Copyright 2026 The klab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "klab/error.hpp"

#include <atomic>

#include "klab/parallel.hpp"

namespace klab {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::CompositeModulus: return "CompositeModulus";
    case ErrorKind::TooSmall: return "TooSmall";
    case ErrorKind::ResourceLimit: return "ResourceLimit";
    case ErrorKind::ZeroScale: return "ZeroScale";
    case ErrorKind::RangeTooLarge: return "RangeTooLarge";
    case ErrorKind::ZeroS: return "ZeroS";
    case ErrorKind::BadPair: return "BadPair";
    case ErrorKind::NotDistinct: return "NotDistinct";
    case ErrorKind::WrongParity: return "WrongParity";
    case ErrorKind::ConstraintViolated: return "ConstraintViolated";
    case ErrorKind::HypothesisViolated: return "HypothesisViolated";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::CharDividesK: return "CharDividesK";
    case ErrorKind::NoKthRoots: return "NoKthRoots";
    case ErrorKind::OutOfRange: return "OutOfRange";
    case ErrorKind::BadResidue: return "BadResidue";
    case ErrorKind::UsageError: return "UsageError";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

namespace {
std::atomic<unsigned> g_workers{1};
}  // namespace

void set_worker_count(unsigned workers) { g_workers.store(workers == 0 ? 1 : workers); }
unsigned worker_count() { return g_workers.load(); }

}  // namespace klab
