#pragma once

#define AKLAB_VERSION "0.1.0"
