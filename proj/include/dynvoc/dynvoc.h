// include/dynvoc/dynvoc.h

// Copyright 2026 The dynvoc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef DYNVOC_DYNVOC_H_
#define DYNVOC_DYNVOC_H_

#include "dynvoc/arpa.h"
#include "dynvoc/base.h"
#include "dynvoc/compose.h"
#include "dynvoc/connect.h"
#include "dynvoc/corpus.h"
#include "dynvoc/decode.h"
#include "dynvoc/determinize.h"
#include "dynvoc/equiv.h"
#include "dynvoc/graph_build.h"
#include "dynvoc/io.h"
#include "dynvoc/lazy_compose.h"
#include "dynvoc/lexicon.h"
#include "dynvoc/lookahead.h"
#include "dynvoc/minimize.h"
#include "dynvoc/paths.h"
#include "dynvoc/push.h"
#include "dynvoc/recipe.h"
#include "dynvoc/replace.h"
#include "dynvoc/rmeps_local.h"
#include "dynvoc/symbol_table.h"
#include "dynvoc/toy.h"
#include "dynvoc/vocab_expand.h"
#include "dynvoc/weight.h"
#include "dynvoc/wfst.h"

#endif  // DYNVOC_DYNVOC_H_
