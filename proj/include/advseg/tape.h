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

#ifndef ADVSEG_TAPE_H_
#define ADVSEG_TAPE_H_

#include <cstddef>
#include <functional>
#include <initializer_list>
#include <memory>
#include <span>
#include <vector>

#include "advseg/tensor.h"

namespace advseg {

// Reverse-mode gradient tape. Operations executed while a tape is recording
// append an entry holding their inputs, output and backward rule. Entries
// land in execution order, which is a topological order of the graph.
//
//   Tape tape;
//   Tensor loss;
//   {
//     Tape::Recording rec(tape);
//     loss = Sum(Mul(x, x));
//   }
//   std::vector<Tensor> grads = tape.Backward(loss, {x});
//
// A tape is built for one forward pass and discarded afterwards.
template <typename T>
class BasicTape {
 public:
  using Node = internal::TensorNode<T>;
  using NodePtr = std::shared_ptr<Node>;
  // Called with one flag per input: nonzero when that input needs its
  // gradient. Reads output->grad and accumulates into the inputs' grad
  // buffers, which Backward has already sized and zeroed.
  using BackwardFn = std::function<void(std::span<const char> need)>;

  BasicTape() = default;
  BasicTape(const BasicTape&) = delete;
  BasicTape& operator=(const BasicTape&) = delete;

  // RAII guard making a tape the active recorder on this thread.
  class Recording {
   public:
    explicit Recording(BasicTape& tape) : previous_(active_) { active_ = &tape; }
    ~Recording() { active_ = previous_; }
    Recording(const Recording&) = delete;
    Recording& operator=(const Recording&) = delete;

   private:
    BasicTape* previous_;
  };

  static BasicTape* Active() { return active_; }

  // True when there is an active tape and at least one input requires grad.
  static bool ShouldRecord(std::initializer_list<const BasicTensor<T>*> inputs);

  void Push(std::vector<NodePtr> inputs, NodePtr output, BackwardFn backward);

  std::size_t size() const { return entries_.size(); }

  // Gradients of the scalar `loss` with respect to each tensor in `wrt`,
  // in the same order. Only entries on a path from `wrt` to `loss` run
  // their backward rule. Throws TapeError if loss is not a scalar recorded
  // on this tape or if a requested tensor never took part.
  std::vector<BasicTensor<T>> Backward(const BasicTensor<T>& loss,
                                       std::span<const BasicTensor<T>> wrt);
  std::vector<BasicTensor<T>> Backward(
      const BasicTensor<T>& loss, std::initializer_list<BasicTensor<T>> wrt) {
    std::vector<BasicTensor<T>> list(wrt);
    return Backward(loss, std::span<const BasicTensor<T>>(list));
  }

 private:
  struct Entry {
    std::vector<NodePtr> inputs;
    NodePtr output;
    BackwardFn backward;
  };

  static thread_local BasicTape* active_;
  std::vector<Entry> entries_;
};

using Tape = BasicTape<float>;
using TapeD = BasicTape<double>;

extern template class BasicTape<float>;
extern template class BasicTape<double>;

}  // namespace advseg

#endif  // ADVSEG_TAPE_H_
