#pragma once

#include <odereduce/bipoly.hpp>
#include <odereduce/budget.hpp>
#include <odereduce/corpus.hpp>
#include <odereduce/factor.hpp>
#include <odereduce/gcd.hpp>
#include <odereduce/io.hpp>
#include <odereduce/linalg.hpp>
#include <odereduce/rational.hpp>
#include <odereduce/reducer.hpp>
