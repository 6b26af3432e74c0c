#!/usr/bin/python
# -*- coding: utf-8 -*-

from ansible.module_utils.basic import AnsibleModule

try:
    from ..module_utils.ris.commands import metrics
    from ..module_utils.ris.reporting import run_in_module
    HAS_NUMPY = True
except ImportError:
    HAS_NUMPY = False

DOCUMENTATION = r'''
---
module: ris_metrics
short_description: Scalar metrics of a far-field pattern cut.
description:
    - Reads a pattern CSV (C(theta_deg,phi_deg,re,im)) and reports the peak direction, sidelobe level and half-power beamwidth on one cut.
    - Writes C(metrics.json).
options:
    pattern:
        description:
            - Pattern CSV file.
        required: true
        type: path
    cut_phi:
        description:
            - Azimuth of the cut in degrees; must be on the pattern grid.
        required: false
        type: float
        default: 0.0
    output_dir:
        description:
            - Directory for C(metrics.json).
        required: true
        type: path
author:
    - Oriol Rius (@oriolrius)
'''

EXAMPLES = r'''
- name: Metrics of a steered pattern
  oriolrius.ris.ris_metrics:
    pattern: /tmp/ris/mmwave/patterns/target_000.csv
    output_dir: /tmp/ris/mmwave/metrics
'''

RETURN = r'''
changed:
    description: Whether C(metrics.json) was (or in check mode would be) rewritten.
    type: bool
    returned: always
summary:
    description: Peak direction, peak level, sidelobe level and half-power beamwidth.
    type: dict
    returned: success
'''


def run_module():
    module_args = dict(
        pattern=dict(type='path', required=True),
        cut_phi=dict(type='float', required=False, default=0.0),
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
        return module.params['output_dir'], metrics(module.params['pattern'], module.params['cut_phi'])

    run_in_module(module, compute, result, action="computing pattern metrics")


def main():
    run_module()


if __name__ == '__main__':
    main()
