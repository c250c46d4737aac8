# Copyright 2024 The tickcast Authors.

version = "0.1.0"
