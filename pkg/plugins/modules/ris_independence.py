#!/usr/bin/python
# -*- coding: utf-8 -*-

from ansible.module_utils.basic import AnsibleModule

try:
    from ..module_utils.ris.commands import independence
    from ..module_utils.ris.config import ExperimentConfig
    from ..module_utils.ris.reporting import run_in_module
    HAS_NUMPY = True
except ImportError:
    HAS_NUMPY = False

DOCUMENTATION = r'''
---
module: ris_independence
short_description: Check that the mmWave pattern ignores the sub-6 GHz switch states.
description:
    - Evaluates the mmWave scattered pattern under every switch state of the configured sub-6 element geometry.
    - Reports the largest dB deviation from the decoupled pattern, per state and overall.
    - With I(independence.epsilon=0) in the config the deviation is exactly 0 dB.
options:
    config:
        description:
            - Path to the experiment config JSON. Needs the C(array), C(topology) and C(independence) sections.
        required: true
        type: path
    seed:
        description:
            - Overrides the seed stored in the config.
        required: false
        type: int
    output_dir:
        description:
            - Overrides the output directory stored in the config.
        required: false
        type: path
author:
    - Oriol Rius (@oriolrius)
'''

EXAMPLES = r'''
- name: Cross-band check on the decoupled model
  oriolrius.ris.ris_independence:
    config: "{{ role_path }}/files/independence_reference.json"
    output_dir: /tmp/ris/independence
'''

RETURN = r'''
changed:
    description: Whether any output file was (or in check mode would be) rewritten.
    type: bool
    returned: always
summary:
    description: Coupling epsilon, state count, per-state and maximum deviation in dB.
    type: dict
    returned: success
exit_code:
    description: CLI-equivalent exit code of the failure.
    type: int
    returned: failed
'''


def run_module():
    module_args = dict(
        config=dict(type='path', required=True),
        seed=dict(type='int', required=False),
        output_dir=dict(type='path', required=False)
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
        config = ExperimentConfig.from_file(module.params['config'], module.params['seed'],
                                            module.params['output_dir'])
        return config.resolve(config.output_dir), independence(config)

    run_in_module(module, compute, result, action="checking cross-band independence")


def main():
    run_module()


if __name__ == '__main__':
    main()
