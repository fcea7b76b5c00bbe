/* Copyright 2026 The advseg Authors. All Rights Reserved.

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

#include "advseg/tape.h"

#include <algorithm>
#include <unordered_set>

#include "advseg/error.h"

namespace advseg {

template <typename T>
thread_local BasicTape<T>* BasicTape<T>::active_ = nullptr;

template <typename T>
bool BasicTape<T>::ShouldRecord(
    std::initializer_list<const BasicTensor<T>*> inputs) {
  if (active_ == nullptr) return false;
  for (const BasicTensor<T>* t : inputs) {
    if (t != nullptr && t->defined() && t->requires_grad()) return true;
  }
  return false;
}

template <typename T>
void BasicTape<T>::Push(std::vector<NodePtr> inputs, NodePtr output,
                        BackwardFn backward) {
  output->requires_grad = true;
  entries_.push_back({std::move(inputs), std::move(output), std::move(backward)});
}

template <typename T>
std::vector<BasicTensor<T>> BasicTape<T>::Backward(
    const BasicTensor<T>& loss, std::span<const BasicTensor<T>> wrt) {
  if (!loss.defined() || loss.numel() != 1) {
    throw TapeError("backward needs a scalar loss");
  }
  const Node* loss_node = loss.node().get();
  const bool loss_recorded =
      std::any_of(entries_.begin(), entries_.end(),
                  [&](const Entry& e) { return e.output.get() == loss_node; });
  if (!loss_recorded) throw TapeError("loss was not produced on this tape");

  std::unordered_set<const Node*> seen;
  for (const Entry& e : entries_) {
    for (const NodePtr& in : e.inputs) seen.insert(in.get());
    seen.insert(e.output.get());
  }
  std::unordered_set<const Node*> needed;
  for (std::size_t i = 0; i < wrt.size(); ++i) {
    if (!wrt[i].defined() || !seen.contains(wrt[i].node().get())) {
      throw TapeError("requested tensor #" + std::to_string(i) +
                      " is not on the tape");
    }
    needed.insert(wrt[i].node().get());
  }
  // Forward sweep: an output needs a gradient iff one of its inputs does.
  std::vector<std::vector<char>> need_flags(entries_.size());
  std::vector<char> active(entries_.size(), 0);
  for (std::size_t k = 0; k < entries_.size(); ++k) {
    const Entry& e = entries_[k];
    auto& flags = need_flags[k];
    flags.resize(e.inputs.size());
    for (std::size_t j = 0; j < e.inputs.size(); ++j) {
      flags[j] = needed.contains(e.inputs[j].get()) ? 1 : 0;
      active[k] |= flags[j];
    }
    if (active[k]) needed.insert(e.output.get());
  }

  // Only buffers on a needed path are touched; everything else (model
  // parameters during an input-gradient pass, say) stays as it was.
  for (const Entry& e : entries_) {
    if (needed.contains(e.output.get())) e.output->grad.clear();
    for (const NodePtr& in : e.inputs) {
      if (needed.contains(in.get())) in->grad.clear();
    }
  }
  if (!needed.contains(loss_node)) {
    std::vector<BasicTensor<T>> zeros;
    for (const BasicTensor<T>& t : wrt) zeros.emplace_back(t.shape());
    return zeros;
  }
  loss.node()->grad.assign(1, T(1));

  for (std::size_t k = entries_.size(); k-- > 0;) {
    if (!active[k]) continue;
    Entry& e = entries_[k];
    if (e.output->grad.empty()) continue;  // does not reach the loss
    for (std::size_t j = 0; j < e.inputs.size(); ++j) {
      if (need_flags[k][j] && e.inputs[j]->grad.empty()) {
        e.inputs[j]->grad.assign(e.inputs[j]->data.size(), T(0));
      }
    }
    e.backward(need_flags[k]);
  }

  std::vector<BasicTensor<T>> grads;
  grads.reserve(wrt.size());
  for (const BasicTensor<T>& t : wrt) {
    const Node& n = *t.node();
    if (n.grad.empty()) {
      grads.emplace_back(n.shape);
    } else {
      grads.emplace_back(n.shape, n.grad);
    }
  }
  // Requested tensors keep their grad buffer; intermediates are released.
  std::unordered_set<const Node*> keep;
  for (const BasicTensor<T>& t : wrt) keep.insert(t.node().get());
  auto release = [&](Node& n) {
    if (keep.contains(&n) || !needed.contains(&n)) return;
    n.grad.clear();
    n.grad.shrink_to_fit();
  };
  for (const Entry& e : entries_) {
    release(*e.output);
    for (const NodePtr& in : e.inputs) release(*in);
  }
  return grads;
}

template class BasicTape<float>;
template class BasicTape<double>;

}  // namespace advseg
