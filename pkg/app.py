import os
import logging

from maxaffine.web import create_app

# Application instance for gunicorn: `gunicorn app:app`
app = create_app(os.environ.get('MAXAFFINE_ENV') or 'default')

logger = logging.getLogger(__name__)

if __name__ == '__main__':
    logger.info("Starting maxaffine API")
    app.run(debug=app.config['DEBUG'])
