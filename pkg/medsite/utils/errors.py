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


EXIT_OK = 0
EXIT_INFEASIBLE = 1
EXIT_INVALID_INPUT = 2
EXIT_VIOLATIONS = 3


class MedsiteError(Exception):
    exit_code = EXIT_INVALID_INPUT


class InvalidInputError(MedsiteError):
    def __init__(self, message, violations=None):
        super().__init__(message)
        self.violations = violations


class PlanParseError(InvalidInputError):
    def __init__(self, path, message):
        super().__init__(f'{path}: {message}')
        self.path = path


class InfeasibleError(MedsiteError):
    exit_code = EXIT_INFEASIBLE

    def __init__(self, message, site_id=None):
        super().__init__(message)
        self.site_id = site_id


class SizeLimitError(MedsiteError):
    pass


# Raised when a caller hands over a solution or plan that breaks the structure
# the callee relies on (not a user input problem).
class ContractViolation(MedsiteError):
    pass
