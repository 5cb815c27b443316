#pragma once

#include "rdfcsa/bitvector.hpp"
#include "rdfcsa/common.hpp"
#include "rdfcsa/core.hpp"
#include "rdfcsa/dictionary.hpp"
#include "rdfcsa/join.hpp"
#include "rdfcsa/psi.hpp"
#include "rdfcsa/query.hpp"
#include "rdfcsa/serialize.hpp"
#include "rdfcsa/suffix_array.hpp"
#include "rdfcsa/types.hpp"
