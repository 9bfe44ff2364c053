# Copyright (2025) The medsite authors

# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at

#     https://www.apache.org/licenses/LICENSE-2.0

# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import logging

logger = logging.getLogger(__name__)


class Layer:
    number = 0
    name = ''

    def __init__(self):
        self.messages = []

    def note(self, msg):
        self.messages.append(msg)
        logger.info('layer %d (%s): %s', self.number, self.name, msg)

    def run(self, state):
        raise NotImplementedError
