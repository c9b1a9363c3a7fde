from dotenv import load_dotenv
load_dotenv()

from app import create_app
app = create_app()


if __name__ == "__main__":
    host, _, port = app.config['PIDINST'].bind.partition(':')
    app.run(host=host, port=int(port or 5005), debug=True, use_reloader=False)
