// Copyright 2026 The chronoret Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include "chronoret/corpus.hpp"
#include "chronoret/date.hpp"
#include "chronoret/date_mentions.hpp"
#include "chronoret/embeddings.hpp"
#include "chronoret/error.hpp"
#include "chronoret/eval.hpp"
#include "chronoret/fusion.hpp"
#include "chronoret/index.hpp"
#include "chronoret/routing.hpp"
#include "chronoret/sampling.hpp"
#include "chronoret/temporal.hpp"
#include "chronoret/textdate.hpp"
#include "chronoret/trainer.hpp"
