"""
HTTP API for the spectral gap toolkit.

POST a problem descriptor (see input_validation.py) to

    /api/bound      every applicable bound
    /api/certify    the weight certificate engine (descriptor carries "weight")
    /api/validate   bounds checked against numerical references

GET /api/health reports the effective configuration.
"""

import logging
import os
import sys

import config
from cli import (EXIT_INAPPLICABLE, EXIT_OK, EXIT_VIOLATION, InputError, cmd_bound, cmd_certify,
                 cmd_validate, load_problem)

# Optional dependencies
try:
    from flask import Flask, jsonify, request
    HAS_FLASK = True
except ImportError:
    HAS_FLASK = False

logger = logging.getLogger(__name__)

STATUS = {EXIT_OK: 'ok', EXIT_INAPPLICABLE: 'inapplicable', EXIT_VIOLATION: 'violation'}

if HAS_FLASK:
    app = Flask(__name__)


def _options_response():
    response = jsonify({'status': 'ok'})
    response.headers.add('Access-Control-Allow-Origin', '*')
    response.headers.add('Access-Control-Allow-Headers', 'Content-Type')
    response.headers.add('Access-Control-Allow-Methods', 'POST')
    return response


def _run(command):
    """Shared body of the POST endpoints."""
    if request.method == 'OPTIONS':
        return _options_response()

    data = request.get_json(force=True, silent=True)
    if not data:
        return jsonify({
            'success': False,
            'error': 'Please provide a problem descriptor as a JSON object'
        }), 400

    try:
        descriptor, body, pot = load_problem(data)
        payload, code = command(descriptor, body, pot)
    except InputError as e:
        return jsonify({'success': False, 'error': str(e)}), 400
    except Exception as e:
        logger.exception(f"{command.__name__} failed")
        return jsonify({'success': False, 'error': f'Solver error: {str(e)}'}), 500

    payload['success'] = code != EXIT_VIOLATION
    payload['status'] = payload.get('status', STATUS.get(code, 'error'))
    response = jsonify(payload)
    response.headers.add('Access-Control-Allow-Origin', '*')
    return response


if HAS_FLASK:
    @app.route('/api/bound', methods=['POST', 'OPTIONS'])
    def api_bound():
        """All applicable bounds for a descriptor"""
        return _run(cmd_bound)

    @app.route('/api/certify', methods=['POST', 'OPTIONS'])
    def api_certify():
        """Certify the descriptor's weight"""
        return _run(cmd_certify)

    @app.route('/api/validate', methods=['POST', 'OPTIONS'])
    def api_validate():
        """Sandwich check of the bounds"""
        return _run(cmd_validate)

    @app.route('/api/health', methods=['GET'])
    def api_health():
        """Effective configuration"""
        response = jsonify({'status': 'ok', 'defaults': config.DEFAULTS})
        response.headers.add('Access-Control-Allow-Origin', '*')
        return response


if __name__ == '__main__':
    if not HAS_FLASK:
        print("Error: Flask is not installed. Install with: pip install flask")
        print("For command-line usage: python cli.py --help")
        sys.exit(1)

    config.configure_logging()
    port = int(os.environ.get("PORT", 5000))
    app.run(host='0.0.0.0', port=port, debug=True)
