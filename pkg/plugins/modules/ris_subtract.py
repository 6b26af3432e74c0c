#!/usr/bin/python
# -*- coding: utf-8 -*-

from ansible.module_utils.basic import AnsibleModule

try:
    from ..module_utils.ris.commands import subtract
    from ..module_utils.ris.reporting import run_in_module
    HAS_NUMPY = True
except ImportError:
    HAS_NUMPY = False

DOCUMENTATION = r'''
---
module: ris_subtract
short_description: Remove background scattering from a measured S21 trace.
description:
    - Subtracts the environment trace from the total trace as complex numbers, point by point.
    - Both traces must share the angle grid, the cut and the frequency.
    - Writes C(scat.csv) in the trace format.
options:
    total:
        description:
            - Trace CSV measured with the surface in place.
        required: true
        type: path
    env:
        description:
            - Trace CSV of the empty environment.
        required: true
        type: path
    output_dir:
        description:
            - Directory for C(scat.csv).
        required: true
        type: path
author:
    - Oriol Rius (@oriolrius)
'''

EXAMPLES = r'''
- name: Background-subtract the example measurement
  oriolrius.ris.ris_subtract:
    total: "{{ role_path }}/files/traces/total.csv"
    env: "{{ role_path }}/files/traces/env.csv"
    output_dir: /tmp/ris/measurement
'''

RETURN = r'''
changed:
    description: Whether C(scat.csv) was (or in check mode would be) rewritten.
    type: bool
    returned: always
summary:
    description: Point count and frequency of the scattered trace.
    type: dict
    returned: success
'''


def run_module():
    module_args = dict(
        total=dict(type='path', required=True),
        env=dict(type='path', required=True),
        output_dir=dict(type='path', required=True)
    )

    result = dict(
        changed=False,
        summary={}
    )

    module = AnsibleModule(
        argument_spec=module_args,
        supports_check_mode=True
    )

    if not HAS_NUMPY:
        module.fail_json(msg='numpy and scipy are required. Install them with: pip install -r requirements.txt')

    def compute():
        return module.params['output_dir'], subtract(module.params['total'], module.params['env'])

    run_in_module(module, compute, result, action="subtracting background trace")


def main():
    run_module()


if __name__ == '__main__':
    main()
