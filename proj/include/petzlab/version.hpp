#pragma once

#define PETZLAB_VERSION "0.1.0"
