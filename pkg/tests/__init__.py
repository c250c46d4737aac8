# Copyright 2024 The tickcast Authors.
