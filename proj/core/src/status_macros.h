/* Copyright 2026 The critnav Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef CRITNAV_SRC_STATUS_MACROS_H_
#define CRITNAV_SRC_STATUS_MACROS_H_

#include <utility>

#define CRITNAV_CONCAT_INNER(a, b) a##b
#define CRITNAV_CONCAT(a, b) CRITNAV_CONCAT_INNER(a, b)

#define CRITNAV_ASSIGN_OR_RETURN(lhs, expr) \
  CRITNAV_ASSIGN_OR_RETURN_IMPL(CRITNAV_CONCAT(status_or_, __LINE__), lhs, expr)

#define CRITNAV_ASSIGN_OR_RETURN_IMPL(tmp, lhs, expr) \
  auto tmp = (expr);                                  \
  if (!tmp.ok()) return tmp.status();                 \
  lhs = std::move(*tmp)

#define CRITNAV_RETURN_IF_ERROR(expr)       \
  do {                                      \
    if (absl::Status _st = (expr); !_st.ok()) return _st; \
  } while (0)

#endif  // CRITNAV_SRC_STATUS_MACROS_H_
